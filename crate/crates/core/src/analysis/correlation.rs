use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::merit_order::MeritOrder;

/// Capacity element size used to weight merit orders, MW.
pub const DEFAULT_ELEMENT_MW: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrelationContext {
    Series,
    MeritOrder,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationResult {
    /// Spearman coefficient in [-1, 1].
    pub r: f64,
    pub n: usize,
    pub context: CorrelationContext,
}

/// How merit-order blocks are weighted in [`merit_order_correlation`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Weighting {
    /// One sample per capacity element of the given size, so large plants
    /// count in proportion to their capacity.
    Capacity { element_mw: f64 },
    /// One sample per block regardless of size.
    PerBlock,
}

impl Default for Weighting {
    fn default() -> Self {
        Weighting::Capacity {
            element_mw: DEFAULT_ELEMENT_MW,
        }
    }
}

/// 1-based ranks, ties sharing the mean of the positions they occupy.
pub fn rank_average(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = avg;
        }
        i = j + 1;
    }
    ranks
}

fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

fn spearman_in(x: &[f64], y: &[f64], context: CorrelationContext) -> Result<CorrelationResult> {
    if x.len() != y.len() {
        return Err(Error::InvalidInput(format!(
            "samples differ in length ({} vs {})",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 2 {
        return Err(Error::InvalidInput("need at least two samples".into()));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("samples must be finite".into()));
    }
    let r = pearson(&rank_average(x), &rank_average(y))
        .ok_or(Error::UndefinedCorrelation("constant sample"))?;
    Ok(CorrelationResult {
        r,
        n: x.len(),
        context,
    })
}

/// Spearman rank correlation: Pearson correlation of the average ranks.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<CorrelationResult> {
    spearman_in(x, y, CorrelationContext::Series)
}

/// Rank correlation between marginal cost and emission intensity along the
/// merit order.
pub fn merit_order_correlation(mo: &MeritOrder, weighting: Weighting) -> Result<CorrelationResult> {
    if mo.len() < 2 {
        return Err(Error::UndefinedCorrelation(
            "merit order with fewer than two blocks",
        ));
    }
    let blocks: Vec<usize> = match weighting {
        Weighting::Capacity { element_mw } => {
            if !(element_mw > 0.0) {
                return Err(Error::InvalidInput(format!(
                    "element size must be positive, got {element_mw}"
                )));
            }
            mo.element_blocks(element_mw)
        }
        Weighting::PerBlock => (0..mo.len()).collect(),
    };
    let cost: Vec<f64> = blocks.iter().map(|&i| mo.blocks[i].marginal_cost).collect();
    let eps: Vec<f64> = blocks
        .iter()
        .map(|&i| mo.blocks[i].emission_intensity)
        .collect();
    spearman_in(&cost, &eps, CorrelationContext::MeritOrder)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fuel::FuelType;
    use crate::ingest::{FuelParams, PowerPlant};
    use crate::merit_order::build_merit_order_pp;

    #[test]
    fn average_ranks() {
        assert_eq!(rank_average(&[10.0, 20.0, 20.0, 5.0]), [2.0, 3.5, 3.5, 1.0]);
        assert_eq!(rank_average(&[1.0; 3]), [2.0; 3]);
    }

    #[test]
    fn hand_computed_coefficient() {
        let r = spearman(&[1.0, 2.0, 3.0, 4.0], &[2.0, 1.0, 4.0, 3.0]).unwrap();
        assert!((r.r - 0.6).abs() < 1e-12);
        assert_eq!(r.n, 4);
    }

    #[test]
    fn monotone_and_reversed() {
        let x = [0.3, 1.2, -4.0, 8.0, 2.5];
        let y: Vec<f64> = x.iter().map(|v| v * v * v + 1.0).collect();
        assert_eq!(spearman(&x, &y).unwrap().r, 1.0);
        let z: Vec<f64> = x.iter().map(|v| -v.exp()).collect();
        assert_eq!(spearman(&x, &z).unwrap().r, -1.0);
    }

    #[test]
    fn ties_with_known_value() {
        // ranks x = [1, 2.5, 2.5, 4], y = [1, 2, 3, 4]
        let r = spearman(&[1.0, 2.0, 2.0, 3.0], &[1.0, 2.0, 3.0, 4.0])
            .unwrap()
            .r;
        let expected = 4.5 / (4.5f64.sqrt() * 5.0f64.sqrt());
        assert!((r - expected).abs() < 1e-12);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(matches!(
            spearman(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]),
            Err(Error::UndefinedCorrelation(_))
        ));
        assert!(spearman(&[1.0], &[1.0]).is_err());
        assert!(spearman(&[1.0, 2.0], &[1.0]).is_err());
        assert!(spearman(&[1.0, f64::NAN], &[1.0, 2.0]).is_err());
    }

    fn stack(plants: &[(FuelType, f64, f64)], c_ghg: f64) -> MeritOrder {
        let params = FuelParams::new()
            .with(FuelType::Gas, 0.25, 26.10)
            .with(FuelType::Coal, 0.34, 14.58)
            .with(FuelType::Lignite, 0.36, 6.18);
        let plants: Vec<_> = plants
            .iter()
            .enumerate()
            .map(|(i, (f, c, e))| PowerPlant::new(format!("p{i}"), *f, *c, *e))
            .collect();
        build_merit_order_pp(&plants, &params, c_ghg).unwrap()
    }

    #[test]
    fn cheap_dirty_before_expensive_clean_is_perfectly_anti() {
        let mo = stack(
            &[
                (FuelType::Lignite, 100.0, 0.4),
                (FuelType::GasCc, 100.0, 0.6),
            ],
            0.0,
        );
        for w in [Weighting::default(), Weighting::PerBlock] {
            assert_eq!(merit_order_correlation(&mo, w).unwrap().r, -1.0);
        }
    }

    #[test]
    fn capacity_weighting_counts_elements() {
        let mo = stack(
            &[
                (FuelType::Lignite, 1000.0, 0.4),
                (FuelType::Coal, 15.0, 0.4),
                (FuelType::GasCc, 20.0, 0.6),
            ],
            0.0,
        );
        let w = merit_order_correlation(&mo, Weighting::default()).unwrap();
        assert_eq!(w.n, 104);
        assert_eq!(w.context, CorrelationContext::MeritOrder);
        let b = merit_order_correlation(&mo, Weighting::PerBlock).unwrap();
        assert_eq!(b.n, 3);
        assert_eq!(b.r, -1.0);
    }

    #[test]
    fn single_block_is_undefined() {
        let mo = stack(&[(FuelType::Coal, 100.0, 0.4)], 0.0);
        assert!(matches!(
            merit_order_correlation(&mo, Weighting::default()),
            Err(Error::UndefinedCorrelation(_))
        ));
    }
}
