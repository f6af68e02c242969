//! Core-model properties: RNS/HP equivalence, LP information loss, and the
//! behavioral modulo models against the digital reference.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rnsim_core::analog::{
    mvm_hp, mvm_lp, mvm_rns, phase_shifter_modular_dot, quantize_symmetric, ring_oscillator_modulo,
    CoreConfig, QuantizedVector,
};
use rnsim_core::rns::{modular_dot, Preset};

fn random_tile(
    rng: &mut ChaCha8Rng,
    rows: usize,
    cols: usize,
    bits: u32,
) -> (Vec<QuantizedVector>, QuantizedVector) {
    let w: Vec<QuantizedVector> = (0..rows)
        .map(|_| {
            let v: Vec<f32> = (0..cols).map(|_| rng.gen_range(-1.0f32..1.0)).collect();
            quantize_symmetric(&v, bits).unwrap()
        })
        .collect();
    let xv: Vec<f32> = (0..cols).map(|_| rng.gen_range(-1.0f32..1.0)).collect();
    (w, quantize_symmetric(&xv, bits).unwrap())
}

#[test]
fn rns_raw_outputs_equal_hp_for_every_preset() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for preset in Preset::ALL {
        let bits = preset.data_bits();
        let rns = CoreConfig::rns_preset(preset, 32).unwrap();
        let hp = CoreConfig::hp(bits, 32).unwrap();
        for _ in 0..40 {
            let (w, x) = random_tile(&mut rng, 32, 32, bits);
            let a = mvm_rns(&w, &x, &rns).unwrap();
            let b = mvm_hp(&w, &x, &hp).unwrap();
            assert_eq!(a.raw, b.raw, "preset {}", preset.name());
            let fa: Vec<u32> = a.as_float.iter().map(|v| v.to_bits()).collect();
            let fb: Vec<u32> = b.as_float.iter().map(|v| v.to_bits()).collect();
            assert_eq!(fa, fb);
        }
    }
}

#[test]
fn lp_integer_error_dominates_hp_and_float_error_dominates_rns() {
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    let bits = 6;
    let h = 128usize;
    let lp = CoreConfig::lp(bits, h as u64).unwrap();
    let hp = CoreConfig::hp(bits, h as u64).unwrap();
    let rns = CoreConfig::rns_preset(Preset::Rns6, h as u64).unwrap();
    let mut lp_int_err = 0f64;
    let mut lp_float_err = 0f64;
    let mut rns_float_err = 0f64;
    let trials = 300;
    for _ in 0..trials {
        let wv: Vec<f32> = (0..h).map(|_| rng.gen_range(-1.0f32..1.0)).collect();
        let xv: Vec<f32> = (0..h).map(|_| rng.gen_range(-1.0f32..1.0)).collect();
        let w = vec![quantize_symmetric(&wv, bits).unwrap()];
        let x = quantize_symmetric(&xv, bits).unwrap();
        let exact: f64 = wv.iter().zip(&xv).map(|(&a, &b)| a as f64 * b as f64).sum();

        let lp_out = mvm_lp(&w, &x, &lp).unwrap();
        let hp_out = mvm_hp(&w, &x, &hp).unwrap();
        let rns_out = mvm_rns(&w, &x, &rns).unwrap();
        // HP captures the integer dot product losslessly; LP does not.
        assert_eq!(hp_out.raw[0], {
            let wq = &w[0].values;
            wq.iter().zip(&x.values).map(|(&a, &b)| a * b).sum::<i64>()
        });
        lp_int_err += (lp_out.raw[0] - hp_out.raw[0]).abs() as f64;
        lp_float_err += (lp_out.as_float[0] as f64 - exact).abs();
        rns_float_err += (rns_out.as_float[0] as f64 - exact).abs();
    }
    assert!(lp_int_err > 0.0, "LP must lose integer information at these widths");
    assert!(
        lp_float_err / trials as f64 > rns_float_err / trials as f64,
        "LP mean float error {} must dominate RNS {}",
        lp_float_err / trials as f64,
        rns_float_err / trials as f64
    );
}

#[test]
fn dequantization_error_is_within_half_step() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for bits in [2u32, 4, 6, 8] {
        for _ in 0..50 {
            let v: Vec<f32> = (0..32).map(|_| rng.gen_range(-3.0f32..3.0)).collect();
            let q = quantize_symmetric(&v, bits).unwrap();
            let back = q.dequantize();
            let step = q.scale as f64 / ((1i64 << (bits - 1)) - 1) as f64;
            for (a, b) in v.iter().zip(&back) {
                assert!(
                    ((a - b).abs() as f64) <= step / 2.0 + 1e-6,
                    "bits={bits}: |{a} - {b}| > {}",
                    step / 2.0
                );
            }
        }
    }
}

#[test]
fn corruption_rate_matches_binomial_statistics() {
    use rnsim_core::analog::corrupt_outputs;
    let cfg = CoreConfig::hp(6, 64).unwrap();
    let rows: Vec<QuantizedVector> = (0..64)
        .map(|_| QuantizedVector { values: vec![1; 64], scale: 1.0, bits: 6 })
        .collect();
    let x = QuantizedVector { values: vec![1; 64], scale: 1.0, bits: 6 };
    let tile = mvm_hp(&rows, &x, &cfg).unwrap();
    let p_err = 0.01;
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut corrupted = 0u64;
    let mut elements = 0u64;
    // 1e6 elements in 64-output batches.
    for _ in 0..15_625 {
        let (_, mask) = corrupt_outputs(&tile, &cfg, p_err, &mut rng);
        corrupted += mask.iter().filter(|&&b| b).count() as u64;
        elements += mask.len() as u64;
    }
    let fraction = corrupted as f64 / elements as f64;
    let sigma = (p_err * (1.0 - p_err) / elements as f64).sqrt();
    assert!(
        (fraction - p_err).abs() <= 3.0 * sigma,
        "fraction {fraction} vs {p_err} (sigma {sigma})"
    );
}

#[test]
fn behavioral_modulo_models_agree_with_integer_modulo() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..500 {
        let n = 2 * rng.gen_range(1u64..40) + 1; // odd >= 3
        let a = rng.gen_range(0u64..100_000);
        assert_eq!(ring_oscillator_modulo(a, n).unwrap(), a % n);
    }
    for _ in 0..10_000 {
        let m = rng.gen_range(3u64..256);
        let len = rng.gen_range(1usize..16);
        let digits = 4u32;
        let w: Vec<u64> = (0..len).map(|_| rng.gen_range(0..1 << digits)).collect();
        let x: Vec<u64> = (0..len).map(|_| rng.gen_range(0..m)).collect();
        let wr: Vec<u64> = w.iter().map(|&v| v % m).collect();
        let want = modular_dot(&wr, &x, m).unwrap();
        assert_eq!(phase_shifter_modular_dot(&w, &x, m, digits).unwrap(), want);
    }
}
