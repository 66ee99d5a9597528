use gauss_quad::legendre::GaussLegendre;

use crate::error::{Error, Result};

/// Gauss-Legendre `(node, weight)` pairs on `[-1, 1]`.
pub fn gauss_legendre(nodes: usize) -> Result<Vec<(f64, f64)>> {
    let rule = GaussLegendre::new(nodes).map_err(|_| {
        Error::InvalidParameter(format!("quadrature needs at least 2 nodes, got {nodes}"))
    })?;
    Ok(rule.as_node_weight_pairs().to_vec())
}

/// Gauss-Legendre pairs mapped onto `[a, b]`, weights included.
pub fn gauss_legendre_on(nodes: usize, a: f64, b: f64) -> Result<Vec<(f64, f64)>> {
    let (half, mid) = (0.5 * (b - a), 0.5 * (b + a));
    Ok(gauss_legendre(nodes)?
        .into_iter()
        .map(|(x, w)| (half * x + mid, half * w))
        .collect())
}
