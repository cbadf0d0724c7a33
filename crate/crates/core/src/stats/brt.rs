use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BrtValue {
    pub t: f64,
    pub s: f64,
    pub f: f64,
    pub brt: f64,
    /// Set when t <= s and the threshold is declared 1.
    pub clamped: bool,
    /// Denominators behind t, s and f when computed from tallies.
    pub sample_sizes: Option<(u64, u64, u64)>,
}

pub fn compute_brt(t: f64, s: f64, f: f64) -> BrtValue {
    let gap = t - s;
    let (brt, clamped) = if gap > 0.0 { (f / (f + gap), false) } else { (1.0, true) };
    BrtValue { t, s, f, brt, clamped, sample_sizes: None }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Decision {
    Aggressive,
    Conventional,
    Indifferent,
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Decision::Aggressive => "aggressive",
            Decision::Conventional => "conventional",
            Decision::Indifferent => "indifferent",
        })
    }
}

pub fn decide(p: f64, brt: &BrtValue) -> Decision {
    if p > brt.brt {
        Decision::Aggressive
    } else if p == brt.brt {
        Decision::Indifferent
    } else {
        Decision::Conventional
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::round3;

    #[test]
    fn reference_values() {
        assert_eq!(round3(compute_brt(0.595, 0.328, 0.043).brt), "0.139");
        let clamp = compute_brt(0.5, 0.5, 0.3);
        assert!(clamp.clamped);
        assert_eq!(clamp.brt, 1.0);
        assert_eq!(compute_brt(0.7, 0.2, 0.0).brt, 0.0);
        assert!(compute_brt(0.2, 0.7, 0.0).clamped);
    }

    #[test]
    fn decisions() {
        assert_eq!(decide(0.5, &compute_brt(0.595, 0.328, 0.043)), Decision::Aggressive);
        assert_eq!(decide(0.4, &compute_brt(0.627, 0.398, 0.142)), Decision::Aggressive);
        let v = compute_brt(0.6, 0.4, 0.2);
        assert_eq!(decide(v.brt, &v), Decision::Indifferent);
        assert_eq!(decide(0.1, &v), Decision::Conventional);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn output_in_unit_interval(t in 0.0..=1.0f64, s in 0.0..=1.0f64, f in 0.0..=1.0f64) {
                let v = compute_brt(t, s, f);
                prop_assert!((0.0..=1.0).contains(&v.brt));
                prop_assert_eq!(v.clamped, t <= s);
            }

            #[test]
            fn monotone_in_f_and_gap(s in 0.0..0.5f64, gap in 0.01..0.5f64, f in 0.01..0.9f64, df in 0.001..0.1f64) {
                let base = compute_brt(s + gap, s, f).brt;
                prop_assert!(compute_brt(s + gap, s, f + df).brt > base);
                prop_assert!(compute_brt(s + gap + 0.001, s, f).brt < base);
            }
        }
    }
}
