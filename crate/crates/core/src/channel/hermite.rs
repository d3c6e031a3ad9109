use crate::error::{invalid, Result};

/// Gauss-Hermite rule: `∫ f(u) e^{-u²} du ≈ Σ ψ_w f(u_w)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub order: usize,
    /// Ascending roots of `H_W`.
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

pub const MAX_ORDER: usize = 200;

/// Gauss-Hermite nodes and weights of order `W`.
///
/// Golub-Welsch eigenvalues of the Jacobi matrix seed each root, which is
/// then polished by Newton iteration on the Hermite functions
/// `φ_j(u) = p_j(u)e^{-u²/2}` (orthonormal polynomials times the half
/// weight, bounded for every supported order). The weight
/// `e^{-u²}/(W·φ_{W-1}(u)²)` is the normalized form of
/// `2^{W-1} W! √π / (W² H_{W-1}(u)²)`.
pub fn gauss_hermite_rule(order: usize) -> Result<QuadratureRule> {
    if !(1..=MAX_ORDER).contains(&order) {
        return invalid(format!("Gauss-Hermite order must lie in 1..={MAX_ORDER}, got {order}"));
    }
    let n = order;
    let mut diag = vec![0.0; n];
    let mut off: Vec<f64> = (0..n).map(|j| (j as f64 / 2.0).sqrt()).collect();
    tridiagonal_eigenvalues(&mut diag, &mut off);
    diag.sort_by(f64::total_cmp);

    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Polish the non-negative half and mirror.
        let mut z = diag[n - 1 - i].abs();
        for _ in 0..50 {
            let (f, fm1) = hermite_functions(n, z);
            // d/du φ_n = √(2n) φ_{n-1} - u φ_n
            let d = (2.0 * n as f64).sqrt() * fm1 - z * f;
            let step = f / d;
            z -= step;
            if step.abs() <= 1e-16 * z.abs().max(1.0) {
                break;
            }
        }
        if n % 2 == 1 && i == n / 2 {
            z = 0.0;
        }
        let (_, fm1) = hermite_functions(n, z);
        let w = (-z * z).exp() / (n as f64 * fm1 * fm1);
        nodes[n - 1 - i] = z;
        nodes[i] = -z;
        weights[n - 1 - i] = w;
        weights[i] = w;
    }
    Ok(QuadratureRule { order: n, nodes, weights })
}

/// `(φ_n(u), φ_{n-1}(u))` by the stable three-term recurrence.
fn hermite_functions(n: usize, u: f64) -> (f64, f64) {
    let mut cur = std::f64::consts::PI.powf(-0.25) * (-0.5 * u * u).exp();
    let mut prev = 0.0;
    for j in 0..n {
        let next = u * (2.0 / (j as f64 + 1.0)).sqrt() * cur - (j as f64 / (j as f64 + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

/// Eigenvalues of a symmetric tridiagonal matrix by implicit QL.
/// `off[i]` couples rows `i-1` and `i`; `off[0]` is ignored.
fn tridiagonal_eigenvalues(d: &mut [f64], e: &mut [f64]) {
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    if n > 0 {
        e[n - 1] = 0.0;
    }
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            assert!(iter < 100, "tridiagonal QL failed to converge");
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut early = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    early = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if early {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
}

impl QuadratureRule {
    /// `Σ ψ_w f(u_w)`.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&u, &w)| w * f(u)).sum()
    }
}
