use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use super::{Field, Grid};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

type PlanPair = (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>);
type PlanCache = Mutex<(FftPlanner<f64>, HashMap<usize, PlanPair>)>;

fn plans(n: usize) -> PlanPair {
    static CACHE: OnceLock<PlanCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new((FftPlanner::new(), HashMap::new())));
    let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
    let (planner, map) = &mut *guard;
    if let Some(p) = map.get(&n) {
        return p.clone();
    }
    let pair = (planner.plan_fft_forward(n), planner.plan_fft_inverse(n));
    map.insert(n, pair.clone());
    pair
}

/// Unnormalized in-place DFT along every axis of a row-major sample array.
pub(crate) fn dft_raw(grid: &Grid, data: &mut [Complex64], dir: Direction) {
    let n = grid.points_per_axis();
    let (fwd, inv) = plans(n);
    let fft = match dir {
        Direction::Forward => fwd,
        Direction::Inverse => inv,
    };
    // rustfft transforms every consecutive chunk of length n
    fft.process(data);
    if grid.dim() == 2 {
        transpose_square(data, n);
        fft.process(data);
        transpose_square(data, n);
    }
}

fn transpose_square(data: &mut [Complex64], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            data.swap(i * n + j, j * n + i);
        }
    }
}

/// Unitary DFT in place: both directions carry `1/√N`.
pub(crate) fn dft_unitary(grid: &Grid, data: &mut [Complex64], dir: Direction) {
    dft_raw(grid, data, dir);
    let s = 1.0 / (grid.len() as f64).sqrt();
    data.iter_mut().for_each(|z| *z *= s);
}

/// Unitary discrete Fourier transform of a field. The result lives on the
/// same grid, indexed in FFT order.
pub fn fourier_transform(f: &Field, dir: Direction) -> Result<Field> {
    let mut values = f.values().to_vec();
    dft_unitary(f.grid(), &mut values, dir);
    Field::new(*f.grid(), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn single_mode_maps_to_delta() {
        let g = Grid::new(1, 64, 2.0 * PI).unwrap();
        let m0 = 5;
        let f = Field::from_fn(g, |x| Complex64::from_polar(1.0, m0 as f64 * x[0]));
        let fh = fourier_transform(&f, Direction::Forward).unwrap();
        let peak = fh
            .values()
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
            .unwrap()
            .0;
        assert_eq!(peak, m0);
        assert!((g.wavenumber(peak) - m0 as f64).abs() < 1e-12);
        let others: f64 = fh.values().iter().enumerate().filter(|(i, _)| *i != m0).map(|(_, z)| z.norm()).sum();
        assert!(others < 1e-10);
    }

    #[test]
    fn two_dimensional_round_trip() {
        let g = Grid::new(2, 16, 10.0).unwrap();
        let f = Field::from_fn(g, |x| Complex64::new((-x[0] * x[0]).exp(), x[1].sin() * 0.1));
        let back = fourier_transform(&fourier_transform(&f, Direction::Forward).unwrap(), Direction::Inverse).unwrap();
        for (a, b) in f.values().iter().zip(back.values()) {
            assert!((a - b).norm() < 1e-12);
        }
    }
}
