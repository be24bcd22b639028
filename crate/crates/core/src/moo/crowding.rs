//! Crowding distance and dynamic crowding distance (front trimming).

use thiserror::Error;

/// Smallest and largest variation used inside the logarithm of the DCD.
const VARIATION_FLOOR: f64 = 1e-12;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TrimError {
    #[error("trim target must be at least 2, got {0}")]
    TargetTooSmall(usize),
}

/// Per-objective neighbour gaps `|f_{i+1}^k - f_{i-1}^k|` in each
/// objective's sorted order; `None` marks a boundary individual.
fn neighbour_gaps<T: AsRef<[f64]>>(front: &[T]) -> Vec<Option<Vec<f64>>> {
    let n = front.len();
    if n <= 2 {
        return vec![None; n];
    }
    let r = front[0].as_ref().len();
    let mut gaps: Vec<Option<Vec<f64>>> = vec![Some(vec![0.0; r]); n];
    let mut order: Vec<usize> = (0..n).collect();
    for k in 0..r {
        order.sort_by(|&a, &b| front[a].as_ref()[k].total_cmp(&front[b].as_ref()[k]).then(a.cmp(&b)));
        gaps[order[0]] = None;
        gaps[order[n - 1]] = None;
        for p in 1..n - 1 {
            let i = order[p];
            let gap = (front[order[p + 1]].as_ref()[k] - front[order[p - 1]].as_ref()[k]).abs();
            if let Some(g) = gaps[i].as_mut() {
                g[k] = gap;
            }
        }
    }
    gaps
}

/// Mean neighbour gap over the `r` objectives; boundary individuals get
/// `+inf`.
pub fn crowding_distance<T: AsRef<[f64]>>(front: &[T]) -> Vec<f64> {
    neighbour_gaps(front)
        .into_iter()
        .map(|g| match g {
            None => f64::INFINITY,
            Some(g) => g.iter().sum::<f64>() / g.len() as f64,
        })
        .collect()
}

/// `CD / ln(1 / V)` with `V` clamped into (0, 1).
pub fn dcd_from_parts(cd: f64, variation: f64) -> f64 {
    let v = variation.clamp(VARIATION_FLOOR, 1.0 - VARIATION_FLOOR);
    cd / (1.0 / v).ln()
}

/// Dynamic crowding distance of every member: the crowding distance
/// divided by the log of the inverse variation of its neighbour gaps.
pub fn dynamic_crowding_distance<T: AsRef<[f64]>>(front: &[T]) -> Vec<f64> {
    neighbour_gaps(front)
        .into_iter()
        .map(|g| match g {
            None => f64::INFINITY,
            Some(g) => {
                let r = g.len() as f64;
                let cd = g.iter().sum::<f64>() / r;
                let variation = g.iter().map(|x| (x - cd).powi(2)).sum::<f64>() / r;
                dcd_from_parts(cd, variation)
            }
        })
        .collect()
}

/// Removes members one at a time, always the one with the smallest DCD
/// (recomputed after every removal), until `target` remain.
///
/// Returns the indices of the kept members in ascending order. Among equal
/// minima the latest member is removed.
pub fn dcd_trim<T: AsRef<[f64]>>(front: &[T], target: usize) -> Result<Vec<usize>, TrimError> {
    if target < 2 {
        return Err(TrimError::TargetTooSmall(target));
    }
    let mut kept: Vec<usize> = (0..front.len()).collect();
    while kept.len() > target {
        let view: Vec<&[f64]> = kept.iter().map(|&i| front[i].as_ref()).collect();
        let dcd = dynamic_crowding_distance(&view);
        let mut worst = 0;
        for (p, &d) in dcd.iter().enumerate() {
            if d <= dcd[worst] {
                worst = p;
            }
        }
        kept.remove(worst);
    }
    Ok(kept)
}
