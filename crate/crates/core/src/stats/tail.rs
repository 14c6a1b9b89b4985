use crate::error::{Error, Result};
use crate::lattice::GreenOperator;

/// `h^4 sum_{x,y in S} G_D(x,y) G_S(x,y)` for the vertex subset `S` (given as
/// a membership mask), with `G_S` the Dirichlet Green's function of the graph
/// induced by `S`. Exact; one pair of solves per vertex of `S`.
pub fn tail_norm(green: &GreenOperator, subset: &[bool]) -> Result<f64> {
    let domain = green.domain();
    if subset.len() != domain.num_interior() {
        return Err(Error::DomainMismatch);
    }
    if !subset.iter().any(|&b| b) {
        return Ok(0.0);
    }
    let (sub, map) = domain.restrict(|v| subset[v])?;
    let sub_green = GreenOperator::new(std::sync::Arc::new(sub))?;
    let mut total = 0.0;
    for (y, &gy) in map.iter().enumerate() {
        let gs = sub_green.column(y)?;
        let gd = green.column(gy)?;
        total += map.iter().zip(&gs).map(|(&gx, s)| gd[gx] * s).sum::<f64>();
    }
    Ok(domain.mesh().powi(4) * total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::LatticeDomain;
    use std::sync::Arc;

    #[test]
    fn empty_full_and_monotone() {
        let d = Arc::new(LatticeDomain::standard(2).unwrap());
        let g = GreenOperator::new(d.clone()).unwrap();
        let n = d.num_interior();
        assert_eq!(tail_norm(&g, &vec![false; n]).unwrap(), 0.0);
        // full set: h^4 sum G^2, dense check
        let mut dense = 0.0;
        for w in 0..n {
            dense += g.column(w).unwrap().iter().map(|x| x * x).sum::<f64>();
        }
        let full = tail_norm(&g, &vec![true; n]).unwrap();
        assert!((full - d.mesh().powi(4) * dense).abs() < 1e-14);
        let half: Vec<bool> = (0..n).map(|v| d.site(v).i < 0).collect();
        let part = tail_norm(&g, &half).unwrap();
        assert!(part > 0.0 && part < full);
        assert!(tail_norm(&g, &[true]).is_err());
    }
}
