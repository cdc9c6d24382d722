//! Multi-dimensional complex FFT over a mixed-radix torus (row-major, last axis contiguous).

use num_complex::Complex64;
use rustfft::FftPlanner;

/// Unnormalized transform along every axis: forward uses `e(-x.xi)`, inverse `e(+x.xi)`.
pub(crate) fn fft_nd(dims: &[usize], data: &mut [Complex64], inverse: bool) {
    let n: usize = dims.iter().product();
    debug_assert_eq!(n, data.len());
    let mut planner = FftPlanner::<f64>::new();
    let mut stride = 1usize;
    for &len in dims.iter().rev() {
        if len > 1 {
            let fft = if inverse { planner.plan_fft_inverse(len) } else { planner.plan_fft_forward(len) };
            if stride == 1 {
                fft.process(data);
            } else {
                let block = len * stride;
                let mut buf = vec![Complex64::new(0.0, 0.0); len];
                for outer in (0..n).step_by(block) {
                    for inner in 0..stride {
                        let base = outer + inner;
                        for (j, b) in buf.iter_mut().enumerate() {
                            *b = data[base + j * stride];
                        }
                        fft.process(&mut buf);
                        for (j, b) in buf.iter().enumerate() {
                            data[base + j * stride] = *b;
                        }
                    }
                }
            }
        }
        stride *= len;
    }
}

pub(crate) fn to_complex(v: &[i64]) -> Vec<Complex64> {
    v.iter().map(|&x| Complex64::new(x as f64, 0.0)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_naive_2d() {
        let dims = [3usize, 4];
        let v: Vec<i64> = (0..12).map(|i| (i * 7 % 5) as i64).collect();
        let mut d = to_complex(&v);
        fft_nd(&dims, &mut d, false);
        for x0 in 0..3 {
            for x1 in 0..4 {
                let mut s = Complex64::new(0.0, 0.0);
                for y0 in 0..3 {
                    for y1 in 0..4 {
                        let ph = -2.0
                            * std::f64::consts::PI
                            * ((x0 * y0) as f64 / 3.0 + (x1 * y1) as f64 / 4.0);
                        s += Complex64::from_polar(v[y0 * 4 + y1] as f64, ph);
                    }
                }
                assert!((s - d[x0 * 4 + x1]).norm() < 1e-9);
            }
        }
        fft_nd(&dims, &mut d, true);
        for (a, &b) in d.iter().zip(&v) {
            assert!((a.re / 12.0 - b as f64).abs() < 1e-9);
        }
    }
}
