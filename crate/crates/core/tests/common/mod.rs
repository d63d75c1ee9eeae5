#![allow(dead_code)]

use hwroots::{Complex64, Expr};
use rand::Rng;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Cost of the optimal one-to-one matching between `got` and `want`,
/// measured as the largest matched distance. Brute force over permutations
/// for small sets, which is all the tests need.
pub fn bottleneck_match(got: &[Complex64], want: &[Complex64]) -> Option<f64> {
    if got.len() != want.len() {
        return None;
    }
    let n = got.len();
    assert!(n <= 8, "bottleneck_match is exhaustive; keep sets small");
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = f64::INFINITY;
    permute(&mut perm, 0, &mut |p| {
        let cost = p
            .iter()
            .enumerate()
            .map(|(i, &j)| (got[i] - want[j]).norm())
            .fold(0.0, f64::max);
        if cost < best {
            best = cost;
        }
    });
    Some(best)
}

fn permute(p: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == p.len() {
        visit(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permute(p, k + 1, visit);
        p.swap(k, i);
    }
}

/// Uniform point in the disc of the given radius.
pub fn disc_point<R: Rng>(rng: &mut R, radius: f64) -> Complex64 {
    let r = radius * rng.gen::<f64>().sqrt();
    Complex64::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU))
}

/// `count` points in a disc with pairwise distance at least `sep`.
pub fn separated_points<R: Rng>(
    rng: &mut R,
    count: usize,
    radius: f64,
    sep: f64,
) -> Vec<Complex64> {
    loop {
        let pts: Vec<Complex64> = (0..count).map(|_| disc_point(rng, radius)).collect();
        let ok = (0..count).all(|i| (i + 1..count).all(|j| (pts[i] - pts[j]).norm() >= sep));
        if ok {
            return pts;
        }
    }
}

/// `∏ (z - r)` as an expression.
pub fn product_expr(roots: &[Complex64]) -> Expr {
    let mut it = roots.iter().map(|&r| Expr::Var.sub(Expr::constant(r)));
    let first = it.next().expect("at least one root");
    it.fold(first, Expr::mul)
}

/// Expressions from the worked examples, paired with a radius inside
/// which they are analytic about 0.
pub fn worked_expressions() -> Vec<(&'static str, f64)> {
    vec![
        ("(z-2)*(z-3)*(z-5)", 3.0),
        ("(z-2)*(z-3) - 2*(z-5)*(z-1)", 3.0),
        ("sin(z)", 3.0),
        ("sin(z)+exp(sin(z))/sqrt(1+tanh(z))", 1.0),
        ("z^3-4*z^2+5*z", 3.0),
        ("z*(1 - 0.1*sinc(z)) - 1", 3.0),
        ("z*exp(z)", 3.0),
    ]
}
