use super::{Expr, Func};

/// Rewrites every `exp(log(u))` to `u`, repeated to a fixpoint. No other
/// rewriting is done.
///
/// On the branch cut of `log` the rewritten form is defined where the
/// original is not (`u = 0`); everywhere else both evaluate equal.
pub fn simplify_exp_log(e: &Expr) -> Expr {
    let mut current = e.clone();
    loop {
        let (next, changed) = rewrite(current);
        current = next;
        if !changed {
            return current;
        }
    }
}

fn rewrite(e: Expr) -> (Expr, bool) {
    match e {
        Expr::Const(_) | Expr::Var => (e, false),
        Expr::Neg(a) => {
            let (a, ch) = rewrite(*a);
            (Expr::Neg(Box::new(a)), ch)
        }
        Expr::Binary(op, a, b) => {
            let (a, ca) = rewrite(*a);
            let (b, cb) = rewrite(*b);
            (Expr::binary(op, a, b), ca || cb)
        }
        Expr::Call(func, arg) => {
            let (arg, ch) = rewrite(*arg);
            match (func, arg) {
                (Func::Exp, Expr::Call(Func::Log, inner)) => (*inner, true),
                (func, arg) => (Expr::call(func, arg), ch),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    #[test]
    fn defining_rewrite() {
        assert_eq!(
            simplify_exp_log(&parse("exp(log(z+1))").unwrap()),
            parse("z+1").unwrap()
        );
    }

    #[test]
    fn functional_index_pattern() {
        let e = parse("z*exp(log((z-2)*(z-3)*(z-5)/z))").unwrap();
        assert_eq!(
            simplify_exp_log(&e),
            parse("z*((z-2)*(z-3)*(z-5)/z)").unwrap()
        );
    }

    #[test]
    fn nested_and_off_pattern() {
        assert_eq!(
            simplify_exp_log(&parse("exp(log(exp(log(sin(z)))))").unwrap()),
            parse("sin(z)").unwrap()
        );
        let s = parse("sin(z)").unwrap();
        assert_eq!(simplify_exp_log(&s), s);
        // log(exp(u)) is not an identity off the principal strip; leave it.
        let le = parse("log(exp(z))").unwrap();
        assert_eq!(simplify_exp_log(&le), le);
    }
}
