use gauss_quad::GaussLegendre;
use std::num::NonZeroUsize;

/// Composite Gauss–Legendre rule on `[a, b]`: `panels` equal panels of `points` nodes each.
/// Returns `(node, weight)` pairs in increasing node order.
pub fn gauss_legendre(a: f64, b: f64, points: usize, panels: usize) -> Vec<(f64, f64)> {
    let rule = GaussLegendre::new(NonZeroUsize::new(points.max(1)).expect("nonzero"));
    let mut base: Vec<(f64, f64)> = rule.as_node_weight_pairs().to_vec();
    base.sort_by(|x, y| x.0.total_cmp(&y.0));
    let panels = panels.max(1);
    let h = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(points * panels);
    for k in 0..panels {
        let lo = a + k as f64 * h;
        for &(x, w) in &base {
            out.push((lo + 0.5 * h * (x + 1.0), 0.5 * h * w));
        }
    }
    out
}
