use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, StandardNormal};

/// Deterministic quantifier sampling: every frame combination plus a fixed
/// number of random tuples of unit vectors, from a stream determined by
/// `(seed, point, slot)` alone.
#[derive(Debug, Clone)]
pub struct Sampler {
    rng: ChaCha8Rng,
    random: usize,
}

impl Sampler {
    pub fn new(seed: u64, point: u64, slot: u64, random: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(point.wrapping_mul(1 << 8).wrapping_add(slot));
        Sampler { rng, random }
    }

    /// Random unit vector in the span of an orthonormal frame.
    pub fn unit_in(&mut self, frame: &[DVector<f64>]) -> DVector<f64> {
        let n = frame[0].len();
        loop {
            let mut v = DVector::zeros(n);
            for e in frame {
                let c: f64 = StandardNormal.sample(&mut self.rng);
                v.axpy(c, e, 1.0);
            }
            let norm = v.norm();
            if norm > 1e-3 {
                return v / norm;
            }
        }
    }

    /// Frame vectors followed by random unit vectors of their span.
    pub fn vectors(&mut self, frame: &[DVector<f64>]) -> Vec<DVector<f64>> {
        if frame.is_empty() {
            return Vec::new();
        }
        let mut out = frame.to_vec();
        for _ in 0..self.random {
            out.push(self.unit_in(frame));
        }
        out
    }

    /// All tuples of frame vectors followed by random tuples; empty if any
    /// slot has an empty frame.
    pub fn tuples(&mut self, frames: &[&[DVector<f64>]]) -> Vec<Vec<DVector<f64>>> {
        if frames.iter().any(|f| f.is_empty()) {
            return Vec::new();
        }
        let mut out: Vec<Vec<DVector<f64>>> = vec![Vec::new()];
        for frame in frames {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    frame.iter().map(move |v| {
                        let mut t = prefix.clone();
                        t.push(v.clone());
                        t
                    })
                })
                .collect();
        }
        for _ in 0..self.random {
            out.push(frames.iter().map(|f| self.unit_in(f)).collect());
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(n: usize, i: usize) -> DVector<f64> {
        let mut v = DVector::zeros(n);
        v[i] = 1.0;
        v
    }

    #[test]
    fn tuples_cover_frames_then_random() {
        let a = [e(4, 0), e(4, 1)];
        let b = [e(4, 2)];
        let mut s = Sampler::new(0, 3, 1, 5);
        let t = s.tuples(&[&a, &b]);
        assert_eq!(t.len(), 2 + 5);
        assert_eq!(t[1], vec![e(4, 1), e(4, 2)]);
        for tup in &t[2..] {
            assert!((tup[0].norm() - 1.0).abs() < 1e-12);
            assert_eq!(tup[0][2], 0.0);
        }
        assert!(s.tuples(&[&a, &[]]).is_empty());
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let f = [e(3, 0), e(3, 1), e(3, 2)];
        let x = Sampler::new(1, 2, 3, 4).vectors(&f);
        assert_eq!(x, Sampler::new(1, 2, 3, 4).vectors(&f));
        assert_ne!(x, Sampler::new(1, 2, 4, 4).vectors(&f));
        assert_ne!(x, Sampler::new(1, 3, 3, 4).vectors(&f));
    }
}
