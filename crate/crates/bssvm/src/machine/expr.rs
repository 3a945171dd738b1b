//! Expression trees for compute assignments and branch tests: rational
//! functions of finitely many tape cells and machine parameters.

use num_rational::BigRational;

use super::Tape;
use crate::scalar::{arith, rat_to_string, ArithOp, Scalar, ScalarError};

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Cell(i64),
    Param(usize),
    Const(BigRational),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, u32),
}

impl Expr {
    pub fn cell(i: i64) -> Expr {
        Expr::Cell(i)
    }

    pub fn c_int(v: i64) -> Expr {
        Expr::Const(BigRational::from_integer(v.into()))
    }

    pub fn uses_div(&self) -> bool {
        match self {
            Expr::Div(..) => true,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => a.uses_div() || b.uses_div(),
            Expr::Neg(a) => a.uses_div(),
            Expr::Pow(a, _) => a.uses_div(),
            _ => false,
        }
    }

    /// All parameter indices referenced by the expression.
    pub fn visit_params(&self, f: &mut impl FnMut(usize)) {
        match self {
            Expr::Param(i) => f(*i),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.visit_params(f);
                b.visit_params(f);
            }
            Expr::Neg(a) | Expr::Pow(a, _) => a.visit_params(f),
            _ => {}
        }
    }

    /// All constants in the expression.
    pub fn visit_consts(&self, f: &mut impl FnMut(&BigRational)) {
        match self {
            Expr::Const(c) => f(c),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.visit_consts(f);
                b.visit_consts(f);
            }
            Expr::Neg(a) | Expr::Pow(a, _) => a.visit_consts(f),
            _ => {}
        }
    }

    /// Exact evaluation against a tape and parameter bindings.
    pub fn eval(&self, tape: &Tape, params: &[(String, Scalar)]) -> Result<Scalar, ScalarError> {
        match self {
            Expr::Cell(i) => Ok(tape.get(*i)),
            Expr::Param(i) => Ok(params[*i].1.clone()),
            Expr::Const(c) => Ok(Scalar::Rat(c.clone())),
            Expr::Add(a, b) => arith(ArithOp::Add, &a.eval(tape, params)?, &b.eval(tape, params)?),
            Expr::Sub(a, b) => arith(ArithOp::Sub, &a.eval(tape, params)?, &b.eval(tape, params)?),
            Expr::Mul(a, b) => arith(ArithOp::Mul, &a.eval(tape, params)?, &b.eval(tape, params)?),
            Expr::Div(a, b) => arith(ArithOp::Div, &a.eval(tape, params)?, &b.eval(tape, params)?),
            Expr::Neg(a) => Ok(a.eval(tape, params)?.neg()),
            Expr::Pow(a, e) => a.eval(tape, params)?.pow(*e),
        }
    }

    /// Render in the machine description syntax; parameter indices are
    /// resolved through the supplied name table.
    pub fn render(&self, param_names: &[String]) -> String {
        self.render_prec(param_names, 0)
    }

    fn render_prec(&self, names: &[String], prec: u8) -> String {
        let (s, my_prec) = match self {
            Expr::Cell(i) => (format!("x{i}"), 3),
            Expr::Param(i) => (names[*i].clone(), 3),
            Expr::Const(c) => {
                let p = if c.is_negative_literal() { 2 } else { 3 };
                (rat_to_string(c), p)
            }
            Expr::Add(a, b) => (
                format!("{}+{}", a.render_prec(names, 1), b.render_prec(names, 1)),
                1,
            ),
            Expr::Sub(a, b) => (
                format!("{}-{}", a.render_prec(names, 1), b.render_prec(names, 2)),
                1,
            ),
            Expr::Mul(a, b) => (
                format!("{}*{}", a.render_prec(names, 2), b.render_prec(names, 2)),
                2,
            ),
            Expr::Div(a, b) => (
                format!("{}/{}", a.render_prec(names, 2), b.render_prec(names, 3)),
                2,
            ),
            Expr::Neg(a) => (format!("-{}", a.render_prec(names, 3)), 2),
            Expr::Pow(a, e) => (format!("{}^{e}", a.render_prec(names, 3)), 3),
        };
        if my_prec < prec {
            format!("({s})")
        } else {
            s
        }
    }
}

trait NegativeLiteral {
    fn is_negative_literal(&self) -> bool;
}

impl NegativeLiteral for BigRational {
    fn is_negative_literal(&self) -> bool {
        use num_traits::Signed;
        self.is_negative()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Sign;

    #[test]
    fn eval_rational_function() {
        // (x1 + 2/x1) / 2 at x1 = 3/2 gives 17/12
        let e = Expr::Div(
            Box::new(Expr::Add(
                Box::new(Expr::cell(1)),
                Box::new(Expr::Div(Box::new(Expr::c_int(2)), Box::new(Expr::cell(1)))),
            )),
            Box::new(Expr::c_int(2)),
        );
        let mut t = Tape::new();
        t.set(1, Scalar::rat(3, 2));
        let v = e.eval(&t, &[]).unwrap();
        assert!(v.eq_exact(&Scalar::rat(17, 12)).unwrap());
    }

    #[test]
    fn division_by_zero_cell() {
        let e = Expr::Div(Box::new(Expr::c_int(1)), Box::new(Expr::cell(2)));
        let t = Tape::new();
        assert_eq!(e.eval(&t, &[]).unwrap_err(), ScalarError::DivisionByZero);
    }

    #[test]
    fn pow_and_sign() {
        let e = Expr::Sub(
            Box::new(Expr::Pow(Box::new(Expr::cell(1)), 2)),
            Box::new(Expr::c_int(2)),
        );
        let mut t = Tape::new();
        t.set(1, Scalar::rat(577, 408));
        assert_eq!(e.eval(&t, &[]).unwrap().sign(), Sign::Positive);
    }

    #[test]
    fn rendering_respects_precedence() {
        let e = Expr::Mul(
            Box::new(Expr::Add(Box::new(Expr::cell(1)), Box::new(Expr::c_int(1)))),
            Box::new(Expr::cell(2)),
        );
        assert_eq!(e.render(&[]), "(x1+1)*x2");
        let f = Expr::Sub(
            Box::new(Expr::cell(1)),
            Box::new(Expr::Sub(Box::new(Expr::cell(2)), Box::new(Expr::c_int(1)))),
        );
        assert_eq!(f.render(&[]), "x1-(x2-1)");
    }
}
