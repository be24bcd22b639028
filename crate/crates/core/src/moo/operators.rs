//! Real-coded variation operators: simulated binary crossover and bounded
//! polynomial mutation. Random draws are passed in so the operators are
//! pure and directly testable.

/// SBX spread factor for a uniform draw `u` in [0, 1].
pub fn sbx_beta(u: f64, eta_c: f64) -> f64 {
    let exponent = 1.0 / (eta_c + 1.0);
    if u <= 0.5 {
        (2.0 * u).powf(exponent)
    } else {
        (1.0 / (2.0 * (1.0 - u))).powf(exponent)
    }
}

/// SBX children before clipping to bounds.
pub fn sbx_children(p1: &[f64], p2: &[f64], eta_c: f64, draws: &[f64]) -> (Vec<f64>, Vec<f64>) {
    assert_eq!(p1.len(), p2.len(), "parents differ in length");
    assert_eq!(p1.len(), draws.len(), "one draw per gene");
    p1.iter()
        .zip(p2)
        .zip(draws)
        .map(|((&a, &b), &u)| {
            let beta = sbx_beta(u, eta_c);
            (0.5 * ((1.0 + beta) * a + (1.0 - beta) * b), 0.5 * ((1.0 - beta) * a + (1.0 + beta) * b))
        })
        .unzip()
}

/// SBX children clipped to `bounds`.
pub fn sbx_crossover(
    p1: &[f64],
    p2: &[f64],
    eta_c: f64,
    draws: &[f64],
    bounds: &[(f64, f64)],
) -> (Vec<f64>, Vec<f64>) {
    let (mut c1, mut c2) = sbx_children(p1, p2, eta_c, draws);
    clip(&mut c1, bounds);
    clip(&mut c2, bounds);
    (c1, c2)
}

fn clip(x: &mut [f64], bounds: &[(f64, f64)]) {
    for (v, &(lo, hi)) in x.iter_mut().zip(bounds) {
        *v = v.clamp(lo, hi);
    }
}

/// Polynomial perturbation for a uniform draw `r`; zero at `r = 0.5`.
pub fn mutation_delta(r: f64, eta_m: f64) -> f64 {
    let exponent = 1.0 / (eta_m + 1.0);
    if r < 0.5 {
        (2.0 * r).powf(exponent) - 1.0
    } else {
        1.0 - (2.0 * (1.0 - r)).powf(exponent)
    }
}

/// Mutates every gene with its draw. Negative perturbations scale into
/// `[lo, x]`, positive ones into `[x, hi]`, so the result stays in bounds.
/// A draw of 0.5 leaves the gene unchanged.
pub fn polynomial_mutation(x: &[f64], bounds: &[(f64, f64)], eta_m: f64, draws: &[f64]) -> Vec<f64> {
    assert_eq!(x.len(), bounds.len(), "one bound per gene");
    assert_eq!(x.len(), draws.len(), "one draw per gene");
    x.iter()
        .zip(bounds)
        .zip(draws)
        .map(|((&v, &(lo, hi)), &r)| {
            let delta = mutation_delta(r, eta_m);
            let y = if delta < 0.0 { v + (v - lo) * delta } else { v + (hi - v) * delta };
            y.clamp(lo, hi)
        })
        .collect()
}
