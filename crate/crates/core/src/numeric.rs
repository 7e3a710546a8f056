/// Pairwise (cascade) summation. The tree shape depends only on the slice
/// length, so equal inputs always give bit-identical results.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const LEAF: usize = 32;
    if xs.len() <= LEAF {
        xs.iter().sum()
    } else {
        let (lo, hi) = xs.split_at(xs.len() / 2);
        pairwise_sum(lo) + pairwise_sum(hi)
    }
}

/// Sample mean and standard error of the mean (from the unbiased variance).
/// The standard error is `None` for fewer than two samples.
pub fn mean_and_stderr(xs: &[f64]) -> (f64, Option<f64>) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, None);
    }
    let mean = pairwise_sum(xs) / n as f64;
    if n < 2 {
        return (mean, None);
    }
    let sq: Vec<f64> = xs.iter().map(|x| (x - mean) * (x - mean)).collect();
    let var = pairwise_sum(&sq) / (n - 1) as f64;
    (mean, Some((var / n as f64).sqrt()))
}

/// Text form of `x` with at least six significant digits. Shortest
/// round-trip output is kept when it already has that many; zero prints as
/// `0`.
pub fn fmt_sig(x: f64) -> String {
    const MIN_SIG: i32 = 6;
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let s = format!("{x}");
    let digits: String = s
        .chars()
        .take_while(|c| *c != 'e')
        .filter(|c| c.is_ascii_digit())
        .collect();
    let sig = digits.trim_start_matches('0').len() as i32;
    if sig >= MIN_SIG {
        return s;
    }
    let exponent = x.abs().log10().floor() as i32;
    let decimals = (MIN_SIG - 1 - exponent).max(0) as usize;
    format!("{x:.decimals$}")
}
