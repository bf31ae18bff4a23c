/// `e^{-1/x}` for `x > 0`, else 0.
pub fn glue(x: f64) -> f64 {
    if x > 0.0 {
        (-1.0 / x).exp()
    } else {
        0.0
    }
}

/// Smooth step: 1 for `s <= 0`, 0 for `s >= 1`, C-infinity in between.
pub fn smooth_step(s: f64) -> f64 {
    let a = glue(1.0 - s);
    let b = glue(s);
    a / (a + b)
}
