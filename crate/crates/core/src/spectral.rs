//! DFT low-pass smoothing of the radial signature.
//!
//! Bins use 0-based indices with DC at `k = 0`; bin `k` and bin `L - k` are
//! the Hermitian mirror pair of a real signal. Power-of-two lengths go
//! through an iterative radix-2 FFT, other lengths through a table-driven
//! direct transform.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// `L` complex DFT coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum<T = f64> {
    pub coefficients: Vec<Complex<T>>,
}

impl<T: Scalar> Spectrum<T> {
    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// Sum of squared coefficient magnitudes.
    pub fn energy(&self) -> T {
        self.coefficients.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Full complex inverse `(1/L) Σ F(k) e^{+i2πkj/L}`.
    pub fn inverse_complex(&self) -> Vec<Complex<T>> {
        let len = self.len();
        let conj: Vec<Complex<T>> = self.coefficients.iter().map(|c| c.conj()).collect();
        let scale = T::from_count(len).recip();
        transform(&conj).into_iter().map(|c| c.conj() * scale).collect()
    }
}

/// Forward DFT `F(k) = Σ_j x_j e^{-i2πkj/L}` of a real signal.
pub fn dft_forward<T: Scalar>(signal: &[T]) -> Result<Spectrum<T>> {
    if signal.len() < 2 {
        return Err(Error::SignalTooShort { len: signal.len(), min: 2 });
    }
    let input: Vec<Complex<T>> = signal.iter().map(|&x| Complex::new(x, T::zero())).collect();
    Ok(Spectrum { coefficients: transform(&input) })
}

/// Keeps DC, bins `1..=cutoff` and their mirrors `L-cutoff..L`; zeroes the rest.
pub fn lowpass<T: Scalar>(spectrum: &Spectrum<T>, cutoff: usize) -> Result<Spectrum<T>> {
    let len = spectrum.len();
    let max = len / 2;
    if cutoff < 1 || cutoff > max {
        return Err(Error::CutoffOutOfRange { cutoff, len, max });
    }
    let coefficients = spectrum
        .coefficients
        .iter()
        .enumerate()
        .map(|(k, &c)| if k <= cutoff || k >= len - cutoff { c } else { Complex::new(T::zero(), T::zero()) })
        .collect();
    Ok(Spectrum { coefficients })
}

/// Real inverse DFT. Fails when the imaginary residue exceeds
/// [`Scalar::residue_tolerance`] relative to the output's peak magnitude,
/// which means the spectrum was not Hermitian.
pub fn dft_inverse<T: Scalar>(spectrum: &Spectrum<T>) -> Result<Vec<T>> {
    if spectrum.len() < 2 {
        return Err(Error::SignalTooShort { len: spectrum.len(), min: 2 });
    }
    let complex = spectrum.inverse_complex();
    let peak = complex.iter().map(|c| c.re.abs()).fold(T::one(), T::max);
    let residue = complex.iter().map(|c| c.im.abs()).fold(T::zero(), T::max);
    if residue > T::residue_tolerance() * peak {
        return Err(Error::NonHermitianSpectrum { residue: residue.to_f64_lossy() });
    }
    Ok(complex.into_iter().map(|c| c.re).collect())
}

/// Low-pass smoothing of a real signal: forward, symmetric cut, inverse.
pub fn smooth<T: Scalar>(signal: &[T], cutoff: usize) -> Result<Vec<T>> {
    let spectrum = dft_forward(signal)?;
    dft_inverse(&lowpass(&spectrum, cutoff)?)
}

fn twiddles<T: Scalar>(len: usize, count: usize) -> Vec<Complex<T>> {
    let step = -T::TAU() / T::from_count(len);
    (0..count)
        .map(|m| {
            let angle = step * T::from_count(m);
            Complex::new(angle.cos(), angle.sin())
        })
        .collect()
}

fn transform<T: Scalar>(input: &[Complex<T>]) -> Vec<Complex<T>> {
    if input.len().is_power_of_two() {
        fft_radix2(input)
    } else {
        dft_direct(input)
    }
}

fn dft_direct<T: Scalar>(input: &[Complex<T>]) -> Vec<Complex<T>> {
    let len = input.len();
    let table = twiddles::<T>(len, len);
    (0..len)
        .map(|k| {
            input
                .iter()
                .enumerate()
                .fold(Complex::new(T::zero(), T::zero()), |acc, (j, &x)| acc + x * table[(k * j) % len])
        })
        .collect()
}

fn fft_radix2<T: Scalar>(input: &[Complex<T>]) -> Vec<Complex<T>> {
    let len = input.len();
    let bits = len.trailing_zeros();
    let mut data: Vec<Complex<T>> = if len == 1 {
        input.to_vec()
    } else {
        (0..len).map(|i| input[i.reverse_bits() >> (usize::BITS - bits)]).collect()
    };
    let table = twiddles::<T>(len, len / 2);

    let mut size = 2;
    while size <= len {
        let half = size / 2;
        let stride = len / size;
        for block in data.chunks_exact_mut(size) {
            let (lo, hi) = block.split_at_mut(half);
            for (m, (a, b)) in lo.iter_mut().zip(hi.iter_mut()).enumerate() {
                let t = *b * table[m * stride];
                *b = *a - t;
                *a = *a + t;
            }
        }
        size *= 2;
    }
    data
}

#[cfg(test)]
mod tests {
    use super::*;

    fn direct_oracle(signal: &[f64]) -> Vec<Complex<f64>> {
        let len = signal.len() as f64;
        (0..signal.len())
            .map(|k| {
                signal.iter().enumerate().fold(Complex::new(0.0, 0.0), |acc, (j, &x)| {
                    let angle = -2.0 * std::f64::consts::PI * (k * j) as f64 / len;
                    acc + Complex::new(x * angle.cos(), x * angle.sin())
                })
            })
            .collect()
    }

    #[test]
    fn constant_signal_concentrates_in_dc() {
        let spectrum = dft_forward(&[2.5f64; 8]).unwrap();
        assert!((spectrum.coefficients[0] - Complex::new(20.0, 0.0)).norm() < 1e-12);
        for c in &spectrum.coefficients[1..] {
            assert!(c.norm() < 1e-12);
        }
    }

    #[test]
    fn small_signal_matches_direct_sum() {
        let signal = [1.0, 2.0, 3.0, 4.0];
        let got = dft_forward(&signal).unwrap();
        // oracle: [10, -2+2i, -2, -2-2i]
        for (g, w) in got.coefficients.iter().zip(direct_oracle(&signal)) {
            assert!((g - w).norm() < 1e-12);
        }
        assert!((got.coefficients[1] - Complex::new(-2.0, 2.0)).norm() < 1e-12);
    }

    #[test]
    fn non_power_of_two_lengths() {
        let signal: Vec<f64> = (0..12).map(|i| ((i * 7) % 5) as f64 - 1.5).collect();
        let got = dft_forward(&signal).unwrap();
        for (g, w) in got.coefficients.iter().zip(direct_oracle(&signal)) {
            assert!((g - w).norm() < 1e-12);
        }
    }

    #[test]
    fn cosine_occupies_two_bins() {
        let len = 32;
        let m = 5;
        let signal: Vec<f64> = (0..len).map(|j| (std::f64::consts::TAU * (m * j) as f64 / len as f64).cos()).collect();
        let spectrum = dft_forward(&signal).unwrap();
        for (k, c) in spectrum.coefficients.iter().enumerate() {
            if k == m || k == len - m {
                assert!((c.re - 16.0).abs() < 1e-9);
            } else {
                assert!(c.norm() < 1e-9, "bin {k} = {c}");
            }
        }
    }

    #[test]
    fn full_passband_is_identity() {
        let signal: Vec<f64> = (0..16).map(|i| (i as f64).sin()).collect();
        let spectrum = dft_forward(&signal).unwrap();
        assert_eq!(lowpass(&spectrum, 8).unwrap(), spectrum);
    }

    #[test]
    fn cutoff_one_keeps_fundamental() {
        let len = 64;
        let tau = std::f64::consts::TAU;
        let signal: Vec<f64> = (0..len)
            .map(|j| {
                let t = j as f64 / len as f64;
                3.0 + 0.5 * (tau * t).cos() + 0.25 * (tau * 9.0 * t).cos()
            })
            .collect();
        let out = smooth(&signal, 1).unwrap();
        for (j, v) in out.iter().enumerate() {
            let t = j as f64 / len as f64;
            assert!((v - (3.0 + 0.5 * (tau * t).cos())).abs() < 1e-9);
        }
    }

    #[test]
    fn cutoff_range_enforced() {
        let spectrum = dft_forward(&[1.0f64; 16]).unwrap();
        assert!(matches!(lowpass(&spectrum, 0), Err(Error::CutoffOutOfRange { .. })));
        assert!(matches!(lowpass(&spectrum, 9), Err(Error::CutoffOutOfRange { max: 8, .. })));
    }

    #[test]
    fn zero_spectrum_inverts_to_zero() {
        let spectrum = Spectrum { coefficients: vec![Complex::new(0.0f64, 0.0); 16] };
        assert_eq!(dft_inverse(&spectrum).unwrap(), vec![0.0; 16]);
    }

    #[test]
    fn one_sided_cut_is_rejected() {
        // keep bins 0..=2 only: the literal one-sided filter
        let signal: Vec<f64> = (0..16).map(|i| (i as f64 * 0.7).cos() + 1.0).collect();
        let mut spectrum = dft_forward(&signal).unwrap();
        for c in &mut spectrum.coefficients[3..] {
            *c = Complex::new(0.0, 0.0);
        }
        assert!(matches!(dft_inverse(&spectrum), Err(Error::NonHermitianSpectrum { .. })));
    }

    #[test]
    fn too_short_inputs() {
        assert!(matches!(dft_forward::<f64>(&[1.0]), Err(Error::SignalTooShort { .. })));
    }

    #[test]
    fn f32_round_trip() {
        let signal: Vec<f32> = (0..64).map(|i| (i as f32 * 0.3).sin()).collect();
        let back = dft_inverse(&dft_forward(&signal).unwrap()).unwrap();
        for (a, b) in signal.iter().zip(&back) {
            assert!((a - b).abs() < 1e-5);
        }
    }
}
