//! Four-point Gauss–Legendre rule on `[0, 1]` together with its stage
//! integration matrix (the collocation tableau), shared by the Picard and
//! Magnus solvers and by Chen transport.

use num_traits::Float;

/// Nodes `c`, weights `b` and stage matrix `a` with
/// `a[j][m] = int_0^{c_j} l_m(s) ds` for the Lagrange basis `l_m` on `c`.
#[derive(Clone, Copy, Debug)]
pub struct GaussLegendre4 {
    pub nodes: [f64; 4],
    pub weights: [f64; 4],
    pub stage: [[f64; 4]; 4],
}

impl GaussLegendre4 {
    pub fn new() -> Self {
        let s = Float::sqrt(6.0f64 / 5.0);
        let inner = Float::sqrt(3.0 / 7.0 - 2.0 / 7.0 * s);
        let outer = Float::sqrt(3.0 / 7.0 + 2.0 / 7.0 * s);
        let w_inner = (18.0 + Float::sqrt(30.0f64)) / 36.0;
        let w_outer = (18.0 - Float::sqrt(30.0f64)) / 36.0;
        // Mapped from [-1, 1] to [0, 1].
        let nodes = [
            0.5 * (1.0 - outer),
            0.5 * (1.0 - inner),
            0.5 * (1.0 + inner),
            0.5 * (1.0 + outer),
        ];
        let weights = [0.5 * w_outer, 0.5 * w_inner, 0.5 * w_inner, 0.5 * w_outer];
        let mut stage = [[0.0; 4]; 4];
        for m in 0..4 {
            let poly = lagrange_basis(&nodes, m);
            for (j, row) in stage.iter_mut().enumerate() {
                row[m] = integrate_poly(&poly, nodes[j]);
            }
        }
        GaussLegendre4 { nodes, weights, stage }
    }

    /// `int_a^b f` with `panels` equal panels.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, panels: usize, mut f: F) -> f64 {
        let h = (b - a) / panels as f64;
        let mut total = 0.0;
        for p in 0..panels {
            let t0 = a + p as f64 * h;
            for k in 0..4 {
                total += h * self.weights[k] * f(t0 + self.nodes[k] * h);
            }
        }
        total
    }
}

impl Default for GaussLegendre4 {
    fn default() -> Self {
        Self::new()
    }
}

/// Monomial coefficients of the `m`-th Lagrange basis polynomial.
fn lagrange_basis(nodes: &[f64; 4], m: usize) -> [f64; 4] {
    let mut coeffs = [0.0; 4];
    coeffs[0] = 1.0;
    let mut degree = 0;
    let mut denom = 1.0;
    for (k, &ck) in nodes.iter().enumerate() {
        if k == m {
            continue;
        }
        // Multiply by (x - ck).
        for d in (0..=degree + 1).rev() {
            let shifted = if d > 0 { coeffs[d - 1] } else { 0.0 };
            coeffs[d] = shifted - ck * coeffs[d];
        }
        degree += 1;
        denom *= nodes[m] - ck;
    }
    for c in coeffs.iter_mut() {
        *c /= denom;
    }
    coeffs
}

fn integrate_poly(coeffs: &[f64; 4], upper: f64) -> f64 {
    coeffs
        .iter()
        .enumerate()
        .map(|(d, c)| c * Float::powi(upper, d as i32 + 1) / (d + 1) as f64)
        .sum()
}
