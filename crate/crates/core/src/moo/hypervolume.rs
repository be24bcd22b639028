/// Volume dominated by `points` and bounded by `reference` (minimization).
///
/// Points not strictly better than the reference in every objective add
/// nothing. Exact for any dimension by slicing along the last objective.
pub fn hypervolume<T: AsRef<[f64]>>(points: &[T], reference: &[f64]) -> f64 {
    let pts: Vec<Vec<f64>> = points
        .iter()
        .map(|p| p.as_ref().to_vec())
        .filter(|p| p.iter().zip(reference).all(|(x, r)| x < r))
        .collect();
    slice_volume(pts, reference)
}

fn slice_volume(mut pts: Vec<Vec<f64>>, reference: &[f64]) -> f64 {
    if pts.is_empty() {
        return 0.0;
    }
    let d = reference.len();
    match d {
        1 => reference[0] - pts.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min),
        2 => {
            pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
            let mut volume = 0.0;
            let mut best_y = reference[1];
            for p in &pts {
                if p[1] < best_y {
                    volume += (reference[0] - p[0]) * (best_y - p[1]);
                    best_y = p[1];
                }
            }
            volume
        }
        _ => {
            pts.sort_by(|a, b| a[d - 1].total_cmp(&b[d - 1]));
            let mut volume = 0.0;
            for i in 0..pts.len() {
                let upper = if i + 1 < pts.len() { pts[i + 1][d - 1] } else { reference[d - 1] };
                let depth = upper - pts[i][d - 1];
                if depth > 0.0 {
                    let projected: Vec<Vec<f64>> = pts[..=i].iter().map(|p| p[..d - 1].to_vec()).collect();
                    volume += slice_volume(projected, &reference[..d - 1]) * depth;
                }
            }
            volume
        }
    }
}
