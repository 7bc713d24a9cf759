#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayerSide {
    Left,
    Right,
}

/// `exp(-beta x / eps)` (left) or `exp(-beta (1 - x) / eps)` (right), or its
/// derivative of order `deriv`.
pub fn eval_layer_function(x: f64, epsilon: f64, beta: f64, side: LayerSide, deriv: u32) -> f64 {
    let rate = beta / epsilon;
    match side {
        LayerSide::Left => (-rate).powi(deriv as i32) * (-rate * x).exp(),
        LayerSide::Right => rate.powi(deriv as i32) * (-rate * (1.0 - x)).exp(),
    }
}
