use realfft::num_complex::Complex64;
use realfft::RealFftPlanner;

/// Linear convolution of `x` with each of `filters`, truncated or
/// zero-padded to `out_len` samples. `x` is transformed once.
pub fn convolve_many(x: &[f64], filters: &[&[f64]], out_len: usize) -> Vec<Vec<f64>> {
    let longest = filters.iter().map(|f| f.len()).max().unwrap_or(0);
    if x.is_empty() || longest == 0 {
        return vec![vec![0.0; out_len]; filters.len()];
    }
    // an FFT covering the full linear length leaves no circular wrap
    let n_fft = (x.len() + longest - 1).next_power_of_two();
    let mut planner = RealFftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(n_fft);
    let inv = planner.plan_fft_inverse(n_fft);

    let spectrum = |sig: &[f64]| -> Vec<Complex64> {
        let mut buf = vec![0.0; n_fft];
        buf[..sig.len()].copy_from_slice(sig);
        let mut out = fwd.make_output_vec();
        fwd.process(&mut buf, &mut out).expect("sized by plan");
        out
    };
    let xs = spectrum(x);
    filters
        .iter()
        .map(|h| {
            let mut out = vec![0.0; out_len];
            if h.is_empty() {
                return out;
            }
            let mut prod: Vec<Complex64> = spectrum(h).iter().zip(&xs).map(|(a, b)| a * b).collect();
            prod[0].im = 0.0;
            let last = prod.len() - 1;
            prod[last].im = 0.0;
            let mut time = inv.make_output_vec();
            inv.process(&mut prod, &mut time).expect("sized by plan");
            let scale = 1.0 / n_fft as f64;
            for (o, t) in out.iter_mut().zip(&time) {
                *o = t * scale;
            }
            out
        })
        .collect()
}
