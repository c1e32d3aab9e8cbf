use crate::error::{Error, Result};

use super::{ParamStore, Scalar};

/// Adam with bias correction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Adam {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Adam {
    pub fn new(lr: f64) -> Self {
        Adam {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }

    /// Updates every parameter from its accumulated gradient and increments
    /// its step count. Fails if no gradient has been accumulated since the
    /// last `zero_grad`.
    pub fn step<T: Scalar>(&self, store: &mut ParamStore<T>) -> Result<()> {
        if let Some(p) = store.iter().find(|p| !p.has_grad) {
            return Err(Error::State(format!("parameter {} has no gradient", p.name)));
        }
        let (b1, b2) = (T::of(self.beta1), T::of(self.beta2));
        let (one, lr, eps) = (T::one(), T::of(self.lr), T::of(self.eps));
        for p in store.iter_mut() {
            p.step += 1;
            let c1 = one - b1.powi(p.step as i32);
            let c2 = one - b2.powi(p.step as i32);
            let values = p.value.data_mut();
            for i in 0..values.len() {
                let g = p.grad[i];
                let m = b1 * p.first_moment[i] + (one - b1) * g;
                let v = b2 * p.second_moment[i] + (one - b2) * g * g;
                p.first_moment[i] = m;
                p.second_moment[i] = v;
                values[i] -= lr * (m / c1) / ((v / c2).sqrt() + eps);
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::Tensor;

    fn store(values: &[f64], grads: &[f64]) -> ParamStore<f64> {
        let mut s = ParamStore::new();
        for (i, (&v, &g)) in values.iter().zip(grads).enumerate() {
            let id = s.add(&format!("p{i}"), Tensor::scalar(v)).unwrap();
            s.get_mut(id).grad[0] = g;
            s.get_mut(id).has_grad = true;
        }
        s
    }

    #[test]
    fn first_step_moves_by_lr() {
        let mut s = store(&[0.0], &[1.0]);
        Adam::new(0.1).step(&mut s).unwrap();
        let v = s.iter().next().unwrap().value.data()[0];
        // m̂ = 1, v̂ = 1: update = -0.1 / (1 + 1e-8).
        assert!((v + 0.1).abs() < 1e-8, "{v}");
        assert_eq!(s.iter().next().unwrap().step, 1);
    }

    #[test]
    fn zero_gradient_leaves_value_but_counts_step() {
        let mut s = store(&[2.5], &[0.0]);
        Adam::new(0.1).step(&mut s).unwrap();
        let p = s.iter().next().unwrap();
        assert_eq!(p.value.data()[0], 2.5);
        assert_eq!(p.step, 1);
    }

    #[test]
    fn identical_state_gives_identical_updates() {
        let mut s = store(&[1.0, 1.0], &[0.3, 0.3]);
        let adam = Adam::new(0.01);
        for _ in 0..5 {
            adam.step(&mut s).unwrap();
        }
        let vals: Vec<f64> = s.iter().map(|p| p.value.data()[0]).collect();
        assert_eq!(vals[0], vals[1]);
    }

    #[test]
    fn missing_gradient_is_a_state_error() {
        let mut s = store(&[1.0], &[1.0]);
        s.zero_grad();
        assert!(matches!(Adam::new(0.1).step(&mut s), Err(Error::State(_))));
    }
}
