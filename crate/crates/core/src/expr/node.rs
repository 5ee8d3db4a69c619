use super::{Expr, ExprError, Rational, Symbol, TrigKind};

/// Uncanonicalized expression tree, as built by hand or by a raw expansion.
#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Num(Rational),
    Sym(Symbol),
    Sum(Vec<Node>),
    Product(Vec<Node>),
    Pow(Box<Node>, i64),
    Sin(Box<Node>),
    Cos(Box<Node>),
}

impl Node {
    /// Canonical form of the tree.
    pub fn simplify(&self) -> Result<Expr, ExprError> {
        Ok(match self {
            Node::Num(q) => Expr::constant(q.clone()),
            Node::Sym(s) => Expr::sym(s.clone()),
            Node::Sum(xs) => {
                let mut acc = Expr::zero();
                for x in xs {
                    acc += &x.simplify()?;
                }
                acc
            }
            Node::Product(xs) => {
                let mut acc = Expr::one();
                for x in xs {
                    acc = &acc * &x.simplify()?;
                }
                acc
            }
            Node::Pow(b, n) => b.simplify()?.pow(*n)?,
            Node::Sin(a) => Expr::trig_of(TrigKind::Sin, &a.simplify()?).ok_or(ExprError::TrigArgument { pos: 0 })?,
            Node::Cos(a) => Expr::trig_of(TrigKind::Cos, &a.simplify()?).ok_or(ExprError::TrigArgument { pos: 0 })?,
        })
    }
}

impl Expr {
    /// The canonical form viewed as a flat sum of products.
    pub fn to_node(&self) -> Node {
        let terms = self
            .terms()
            .map(|(m, q)| {
                let mut factors = vec![Node::Num(q.clone())];
                for (s, e) in m.factors() {
                    let base = Node::Sym(s.clone());
                    factors.push(if *e == 1 { base } else { Node::Pow(Box::new(base), *e as i64) });
                }
                if let Some(t) = m.trig() {
                    let arg = Box::new(Node::Product(vec![Node::Num(Rational::from_integer(t.m.into())), Node::Sym(Symbol::Phi)]));
                    factors.push(match t.kind {
                        TrigKind::Sin => Node::Sin(arg),
                        TrigKind::Cos => Node::Cos(arg),
                    });
                }
                Node::Product(factors)
            })
            .collect();
        Node::Sum(terms)
    }
}

/// Canonicalization of an already built [`Expr`]; the identity, since every
/// constructor keeps the normal form.
pub fn simplify(e: &Expr) -> Expr {
    e.clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse, rat};

    fn num(n: i64, d: i64) -> Node {
        Node::Num(rat(n, d))
    }

    fn cos(m: i64) -> Node {
        Node::Cos(Box::new(Node::Product(vec![num(m, 1), Node::Sym(Symbol::Phi)])))
    }

    #[test]
    fn pythagorean_style_identity() {
        let tree = Node::Sum(vec![
            Node::Pow(Box::new(cos(1)), 2),
            num(-1, 2),
            Node::Product(vec![num(-1, 2), cos(2)]),
        ]);
        assert!(tree.simplify().unwrap().is_zero());
    }

    #[test]
    fn collects_like_terms() {
        let u = Node::Sym(Symbol::u());
        assert_eq!(Node::Sum(vec![u.clone(), u]).simplify().unwrap(), parse("2*u").unwrap());
    }

    #[test]
    fn round_trips_through_tree() {
        let e = parse("a0*phi*u*cos(2*phi) - ell^-2*up^2 + 3/4").unwrap();
        assert_eq!(e.to_node().simplify().unwrap(), e);
        assert_eq!(simplify(&simplify(&e)), e);
    }

    #[test]
    fn rejects_trig_of_jets() {
        assert!(Node::Sin(Box::new(Node::Sym(Symbol::u()))).simplify().is_err());
    }
}
