//! Closed-form uncoded BER curves for Gray-coded square QAM.
//!
//! 4-QAM is exact. 16- and 64-QAM use the nearest-neighbour approximation
//! `Pb ~ (4/k)(1 - 1/sqrt(M)) Q(sqrt(3 k Eb/N0 / (M - 1)))`; the Rayleigh
//! form averages `Q(sqrt(2g))` over an exponentially distributed `g`, giving
//! `(1 - sqrt(g / (1 + g))) / 2`.

use statrs::function::erf::erfc;

use super::NumericsError;
use crate::channel::ChannelKind;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Gaussian tail probability `Q(x) = erfc(x / sqrt 2) / 2`.
pub fn q_function(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

pub fn theoretical_ber(kind: ChannelKind, order: u32, ebn0_db: f64) -> Result<f64, NumericsError> {
    if !matches!(order, 4 | 16 | 64) {
        return Err(NumericsError::Unsupported(format!(
            "no closed form for constellation order {order}"
        )));
    }
    if ebn0_db.is_nan() {
        return Err(NumericsError::Domain("Eb/N0 is NaN".into()));
    }
    let m = order as f64;
    let k = m.log2();
    let multiplicity = 4.0 / k * (1.0 - 1.0 / m.sqrt());
    let ebn0 = db_to_linear(ebn0_db);
    match kind {
        ChannelKind::Awgn => {
            if ebn0.is_infinite() {
                return Ok(0.0);
            }
            Ok(multiplicity * q_function((3.0 * k * ebn0 / (m - 1.0)).sqrt()))
        }
        ChannelKind::Rayleigh => {
            if ebn0.is_infinite() {
                return Ok(0.0);
            }
            let g = 3.0 * k * ebn0 / (2.0 * (m - 1.0));
            Ok(multiplicity * 0.5 * (1.0 - (g / (1.0 + g)).sqrt()))
        }
        ChannelKind::Rician => Err(NumericsError::Unsupported(
            "no closed-form BER for the Rician channel".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    // erfc oracle by composite Simpson integration of (2/sqrt(pi)) e^{-t^2}
    // over [x, x + 12].
    fn erfc_oracle(x: f64) -> f64 {
        let n = 200_000;
        let h = 12.0 / n as f64;
        let f = |t: f64| (-t * t).exp();
        let mut s = f(x) + f(x + 12.0);
        for i in 1..n {
            let t = x + i as f64 * h;
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(t);
        }
        s * h / 3.0 * 2.0 / std::f64::consts::PI.sqrt()
    }

    #[test]
    fn qpsk_awgn_at_9_6_db() {
        let want = 0.5 * erfc_oracle(db_to_linear(9.6).sqrt());
        let got = theoretical_ber(ChannelKind::Awgn, 4, 9.6).unwrap();
        assert!(((got - want) / want).abs() < 1e-8);
        // ~1.0e-5 (9.736e-6)
        assert!((got - 9.736176e-6).abs() < 1e-11);
    }

    #[test]
    fn limits() {
        assert_eq!(theoretical_ber(ChannelKind::Awgn, 4, f64::INFINITY).unwrap(), 0.0);
        assert!(theoretical_ber(ChannelKind::Awgn, 4, 60.0).unwrap() < 1e-300);
        let coin = theoretical_ber(ChannelKind::Rayleigh, 4, -100.0).unwrap();
        assert!((coin - 0.5).abs() < 1e-5);
        assert_eq!(theoretical_ber(ChannelKind::Rayleigh, 4, f64::NEG_INFINITY).unwrap(), 0.5);
    }

    #[test]
    fn rayleigh_qpsk_closed_form() {
        let g: f64 = 10.0;
        let want = 0.5 * (1.0 - (g / (1.0 + g)).sqrt());
        let got = theoretical_ber(ChannelKind::Rayleigh, 4, 10.0).unwrap();
        assert!((got - want).abs() < 1e-15);
    }

    #[test]
    fn unsupported_inputs() {
        assert!(matches!(
            theoretical_ber(ChannelKind::Rician, 4, 5.0),
            Err(NumericsError::Unsupported(_))
        ));
        assert!(theoretical_ber(ChannelKind::Awgn, 8, 5.0).is_err());
        assert!(theoretical_ber(ChannelKind::Awgn, 4, f64::NAN).is_err());
    }

    proptest! {
        #[test]
        fn decreasing_in_ebn0(m in prop::sample::select(vec![4u32, 16, 64]),
                              awgn in any::<bool>(),
                              a in -10.0f64..20.0, step in 0.01f64..3.0) {
            let kind = if awgn { ChannelKind::Awgn } else { ChannelKind::Rayleigh };
            let lo = theoretical_ber(kind, m, a).unwrap();
            let hi = theoretical_ber(kind, m, a + step).unwrap();
            prop_assert!(hi < lo);
        }

        #[test]
        // The nearest-neighbour form loses this ordering below about -3 dB.
        fn increasing_in_order_on_awgn(e in 0.0f64..18.0) {
            let p4 = theoretical_ber(ChannelKind::Awgn, 4, e).unwrap();
            let p16 = theoretical_ber(ChannelKind::Awgn, 16, e).unwrap();
            let p64 = theoretical_ber(ChannelKind::Awgn, 64, e).unwrap();
            prop_assert!(p4 < p16 && p16 < p64);
        }
    }
}
