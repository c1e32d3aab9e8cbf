use crate::error::{Error, Result};

use super::{Scalar, Tensor};

/// `PE[pos, 2i] = sin(pos / 10000^(2i/d))`, `PE[pos, 2i+1] = cos(...)`.
pub fn sinusoidal_positions<T: Scalar>(k: usize, d: usize) -> Result<Tensor<T>> {
    if !d.is_multiple_of(2) {
        return Err(Error::Config(format!("positional width {d} must be even")));
    }
    let mut data = Vec::with_capacity(k * d);
    for pos in 0..k {
        for i in 0..d / 2 {
            let angle = pos as f64 / 10000f64.powf(2.0 * i as f64 / d as f64);
            data.push(T::of(angle.sin()));
            data.push(T::of(angle.cos()));
        }
    }
    Tensor::new(&[k, d], data)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_values() {
        let pe = sinusoidal_positions::<f64>(4, 6).unwrap();
        let d = pe.data();
        for j in 0..6 {
            assert_eq!(d[j], if j % 2 == 0 { 0.0 } else { 1.0 });
        }
        assert!((d[6] - 0.841471).abs() < 1e-6);
        assert!(d.iter().all(|v| (-1.0..=1.0).contains(v)));
        // Second frequency pair at position 1: 1 / 10000^(2/6).
        assert!((d[8] - (1.0f64 / 10000f64.powf(1.0 / 3.0)).sin()).abs() < 1e-15);
    }

    #[test]
    fn odd_width_is_rejected() {
        assert!(matches!(sinusoidal_positions::<f32>(3, 5), Err(Error::Config(_))));
    }
}
