//! Analytic blade-root flapwise DEL model.
//!
//! Ground truth for the learned surrogate: a smooth closed-form map from
//! window-averaged rotor features to a damage-equivalent load. The functional
//! form makes the control trade-offs non-trivial — loads grow with wind
//! speed, turbulence, and lateral speed asymmetry across the rotor (partial
//! wake), and depend asymmetrically on the yaw sign.

use crate::config::FarmConfig;

/// Window-averaged rotor features feeding the DEL models, in canonical order:
/// 4 sector wind speeds, 4 sector turbulence intensities, yaw.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelFeatures {
    /// Sector mean wind speeds (left, right, top, bottom), m/s.
    pub sector_ws: [f64; 4],
    /// Sector turbulence intensities (same order), fraction.
    pub sector_ti: [f64; 4],
    /// Yaw offset, degrees.
    pub yaw: f64,
}

impl DelFeatures {
    /// Flat 9-vector in canonical order (network input layout).
    pub fn to_array(&self) -> [f64; 9] {
        [
            self.sector_ws[0],
            self.sector_ws[1],
            self.sector_ws[2],
            self.sector_ws[3],
            self.sector_ti[0],
            self.sector_ti[1],
            self.sector_ti[2],
            self.sector_ti[3],
            self.yaw,
        ]
    }

    /// Inverse of [`DelFeatures::to_array`].
    pub fn from_array(a: &[f64; 9]) -> Self {
        Self {
            sector_ws: [a[0], a[1], a[2], a[3]],
            sector_ti: [a[4], a[5], a[6], a[7]],
            yaw: a[8],
        }
    }

    /// Mean of the four sector speeds, m/s.
    pub fn mean_ws(&self) -> f64 {
        self.sector_ws.iter().sum::<f64>() / 4.0
    }

    /// Mean of the four sector turbulence intensities.
    pub fn mean_ti(&self) -> f64 {
        self.sector_ti.iter().sum::<f64>() / 4.0
    }

    /// Left/right speed asymmetry normalized by the mean speed (partial-wake
    /// indicator).
    pub fn asymmetry(&self) -> f64 {
        let u = self.mean_ws();
        if u <= 1e-12 {
            0.0
        } else {
            (self.sector_ws[0] - self.sector_ws[1]).abs() / u
        }
    }
}

/// DEL = c0 * U^e1 * (1 + a1*TI + a2*asym + a3*(yaw/30)^2 + a4*(yaw/30)),
/// kN·m, with U and TI the sector means.
#[derive(Debug, Clone, Copy)]
pub struct DelOracle {
    pub c0: f64,
    pub e1: f64,
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub a4: f64,
}

impl DelOracle {
    pub fn from_config(farm: &FarmConfig) -> Self {
        Self {
            c0: farm.del_c0,
            e1: farm.del_e1,
            a1: farm.del_a1,
            a2: farm.del_a2,
            a3: farm.del_a3,
            a4: farm.del_a4,
        }
    }

    /// Evaluates the closed-form DEL, kN·m. Zero wind gives zero load; the
    /// default coefficients keep the result strictly positive for any
    /// positive wind speed and in-range yaw.
    pub fn eval(&self, f: &DelFeatures) -> f64 {
        let u = f.mean_ws();
        if u <= 0.0 {
            return 0.0;
        }
        let yn = f.yaw / 30.0;
        self.c0
            * u.powf(self.e1)
            * (1.0 + self.a1 * f.mean_ti() + self.a2 * f.asymmetry() + self.a3 * yn * yn
                + self.a4 * yn)
    }

}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn oracle() -> DelOracle {
        DelOracle::from_config(&FarmConfig::default())
    }

    fn uniform(ws: f64, ti: f64, yaw: f64) -> DelFeatures {
        DelFeatures { sector_ws: [ws; 4], sector_ti: [ti; 4], yaw }
    }

    #[test]
    fn reference_value_at_nominal_conditions() {
        // 120 * 10^1.4 * (1 + 8*0.05) = 120 * 25.11886... * 1.4
        let del = oracle().eval(&uniform(10.0, 0.05, 0.0));
        let expect = 120.0 * 10.0f64.powf(1.4) * 1.4;
        assert!((del - expect).abs() < 1e-9);
        assert!((del - 4219.97).abs() < 0.01, "got {del}");
    }

    #[test]
    fn zero_wind_gives_zero_load() {
        assert_eq!(oracle().eval(&uniform(0.0, 0.1, 15.0)), 0.0);
    }

    #[test]
    fn yaw_sign_asymmetry_exact_identity() {
        // oracle(+y) - oracle(-y) = 2 * c0 * U^e1 * a4 * (y/30).
        let o = oracle();
        for (ws, ti, yaw) in [(10.0, 0.05, 20.0), (7.5, 0.12, 5.0), (14.0, 0.0, 30.0)] {
            let plus = o.eval(&uniform(ws, ti, yaw));
            let minus = o.eval(&uniform(ws, ti, -yaw));
            let expect = 2.0 * o.c0 * ws.powf(o.e1) * o.a4 * (yaw / 30.0);
            assert!(
                (plus - minus - expect).abs() < 1e-9,
                "asymmetry identity broken at ws={ws} ti={ti} yaw={yaw}"
            );
            assert!(plus > minus, "positive yaw must load more");
        }
    }

    #[test]
    fn partial_wake_asymmetry_raises_load() {
        let o = oracle();
        let sym = uniform(10.0, 0.05, 0.0);
        let asym = DelFeatures { sector_ws: [12.0, 8.0, 10.0, 10.0], ..sym };
        assert!(o.eval(&asym) > o.eval(&sym));
    }

    #[test]
    fn yaw_terms_shift_the_load_level_not_only_its_sign() {
        // The quadratic and linear yaw terms combine so that +30 degrees
        // costs measurably more than -30 degrees at equal wind.
        let o = oracle();
        let plus = o.eval(&uniform(10.0, 0.05, 30.0));
        let minus = o.eval(&uniform(10.0, 0.05, -30.0));
        let zero = o.eval(&uniform(10.0, 0.05, 0.0));
        assert!(plus > zero && plus > minus);
        assert!(minus > zero, "magnitude term dominates the sign credit at full yaw");
    }

    proptest! {
        #[test]
        fn monotone_in_turbulence_and_asymmetry(
            ws in 4.0f64..16.0,
            ti in 0.0f64..0.3,
            dti in 0.001f64..0.1,
            asym in 0.0f64..0.4,
            dasym in 0.001f64..0.2,
            yaw in -30.0f64..30.0,
        ) {
            let o = oracle();
            let mk = |ti: f64, asym: f64| DelFeatures {
                sector_ws: [ws * (1.0 + asym / 2.0), ws * (1.0 - asym / 2.0), ws, ws],
                sector_ti: [ti; 4],
                yaw,
            };
            prop_assert!(o.eval(&mk(ti + dti, asym)) > o.eval(&mk(ti, asym)));
            prop_assert!(o.eval(&mk(ti, asym + dasym)) > o.eval(&mk(ti, asym)));
        }

        #[test]
        fn strictly_positive_for_positive_wind(
            ws in 0.1f64..25.0,
            ti in 0.0f64..0.4,
            yaw in -30.0f64..30.0,
        ) {
            prop_assert!(oracle().eval(&uniform(ws, ti, yaw)) > 0.0);
        }
    }

    #[test]
    fn feature_array_round_trip() {
        let f = DelFeatures {
            sector_ws: [1.0, 2.0, 3.0, 4.0],
            sector_ti: [0.1, 0.2, 0.3, 0.4],
            yaw: -12.5,
        };
        assert_eq!(DelFeatures::from_array(&f.to_array()), f);
    }
}
