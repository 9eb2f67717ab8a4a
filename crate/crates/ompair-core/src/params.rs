//! Parameter sets and derived quantities.
//!
//! The dimensionless [`SystemParams`] is the canonical representation used
//! by every other module; [`PhysicalParams`] exists only at the ingestion
//! boundary and is converted once via [`nondimensionalize`]. Rates and
//! frequencies are expressed in units of the cavity decay rate.

use core::fmt;

use crate::linear::FixedPoint;

/// Reduced Planck constant [J s].
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant [J/K].
pub const KB: f64 = 1.380_649e-23;

/// Which environment the two mechanical oscillators dissipate into.
///
/// The optical modes always damp into separate vacuum baths; the choice
/// here only affects the mechanical dissipation and noise structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BathKind {
    /// Independent thermal baths, one per oscillator.
    SeparateBaths,
    /// One shared bath coupled to the center-of-mass coordinate
    /// (x1 + x2)/sqrt(2), damping only the symmetric mode.
    CommonBath,
}

/// Bath temperature at the physical boundary.
///
/// Exact zero temperature is a distinct variant rather than `Kelvin(0.0)`
/// so the occupancy map never has to evaluate 1/(e^inf - 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Temperature {
    Zero,
    Kelvin(f64),
}

/// Laboratory-frame parameters of the two-unit optomechanical device.
///
/// Angular frequencies and rates in rad/s, mass in kg, spring coupling in
/// N/m, power in W, the effective optomechanical length in m.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalParams {
    pub mass: f64,
    pub omega_m1: f64,
    pub omega_m2: f64,
    pub kappa: f64,
    pub gamma: f64,
    pub spring_k: f64,
    pub delta0: f64,
    pub input_power: f64,
    pub omega_c: f64,
    pub omega_l: f64,
    pub length_om: f64,
    pub temperature: Temperature,
}

/// Dimensionless model parameters (cavity decay rate = 1).
#[derive(Debug, Clone, PartialEq)]
pub struct SystemParams {
    /// Mechanical frequency of unit 1.
    pub omega_m1: f64,
    /// Mechanical frequency of unit 2.
    pub omega_m2: f64,
    /// Mechanical energy damping rate.
    pub gamma: f64,
    /// Mechanical spring coupling.
    pub k_c: f64,
    /// Laser-cavity detuning (any sign).
    pub delta0: f64,
    /// Drive strength (radiation-pressure scale).
    pub power: f64,
    /// Thermal phonon occupancy of the mechanical bath(s).
    pub n_th: f64,
    pub bath: BathKind,
}

/// Eigenfrequencies of the isolated mechanical pair (identical units).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalModes {
    /// Center-of-mass mode, equal to the bare mechanical frequency.
    pub omega_plus: f64,
    /// Relative mode, sqrt(omega_m^2 + 2 K_c).
    pub omega_minus: f64,
    /// Arithmetic mean of the two.
    pub omega_bar: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ParamError {
    /// A field that must be strictly positive is not.
    NonPositive(&'static str),
    /// A field that must be non-negative is not.
    Negative(&'static str),
    /// A field is NaN or infinite.
    NonFinite(&'static str),
    /// Operation requires identical mechanical frequencies.
    DetunedOscillators,
    /// thermal_occupancy requires r > 0; exact T = 0 is a separate variant
    /// of [`Temperature`].
    NonPositiveRatio,
}

impl fmt::Display for ParamError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamError::NonPositive(name) => write!(f, "{name} must be strictly positive"),
            ParamError::Negative(name) => write!(f, "{name} must be non-negative"),
            ParamError::NonFinite(name) => write!(f, "{name} must be finite"),
            ParamError::DetunedOscillators => {
                write!(f, "operation requires identical mechanical frequencies")
            }
            ParamError::NonPositiveRatio => {
                write!(f, "thermal occupancy ratio must be strictly positive")
            }
        }
    }
}

impl PhysicalParams {
    pub fn validate(&self) -> Result<(), ParamError> {
        let positive = [
            (self.mass, "mass"),
            (self.omega_m1, "omega_m1"),
            (self.omega_m2, "omega_m2"),
            (self.kappa, "kappa"),
            (self.gamma, "gamma"),
            (self.omega_c, "omega_c"),
            (self.omega_l, "omega_l"),
            (self.length_om, "length_om"),
        ];
        for (v, name) in positive {
            if !v.is_finite() {
                return Err(ParamError::NonFinite(name));
            }
            if v <= 0.0 {
                return Err(ParamError::NonPositive(name));
            }
        }
        for (v, name) in [(self.spring_k, "spring_k"), (self.input_power, "input_power")] {
            if !v.is_finite() {
                return Err(ParamError::NonFinite(name));
            }
            if v < 0.0 {
                return Err(ParamError::Negative(name));
            }
        }
        if !self.delta0.is_finite() {
            return Err(ParamError::NonFinite("delta0"));
        }
        if let Temperature::Kelvin(t) = self.temperature {
            if !t.is_finite() {
                return Err(ParamError::NonFinite("temperature"));
            }
            if t <= 0.0 {
                return Err(ParamError::NonPositive("temperature"));
            }
        }
        Ok(())
    }
}

impl SystemParams {
    pub fn validate(&self) -> Result<(), ParamError> {
        for (v, name) in [
            (self.omega_m1, "omega_m1"),
            (self.omega_m2, "omega_m2"),
            (self.gamma, "gamma"),
        ] {
            if !v.is_finite() {
                return Err(ParamError::NonFinite(name));
            }
            if v <= 0.0 {
                return Err(ParamError::NonPositive(name));
            }
        }
        for (v, name) in [(self.k_c, "k_c"), (self.power, "power"), (self.n_th, "n_th")] {
            if !v.is_finite() {
                return Err(ParamError::NonFinite(name));
            }
            if v < 0.0 {
                return Err(ParamError::Negative(name));
            }
        }
        if !self.delta0.is_finite() {
            return Err(ParamError::NonFinite("delta0"));
        }
        Ok(())
    }

    /// Mechanical quality factor of unit 1, omega_m / Gamma.
    pub fn q_factor(&self) -> f64 {
        self.omega_m1 / self.gamma
    }

    pub fn identical_oscillators(&self) -> bool {
        self.omega_m1 == self.omega_m2
    }

    /// Common mechanical frequency; errors when the units are detuned.
    pub fn omega_m(&self) -> Result<f64, ParamError> {
        if self.identical_oscillators() {
            Ok(self.omega_m1)
        } else {
            Err(ParamError::DetunedOscillators)
        }
    }

    /// FNV-1a over the raw field bits; used to tag covariance matrices
    /// with the parameter set that produced them.
    pub fn fingerprint(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut eat = |bits: u64| {
            for byte in bits.to_le_bytes() {
                h ^= byte as u64;
                h = h.wrapping_mul(0x1000_0000_01b3);
            }
        };
        for v in [
            self.omega_m1,
            self.omega_m2,
            self.gamma,
            self.k_c,
            self.delta0,
            self.power,
            self.n_th,
        ] {
            eat(v.to_bits());
        }
        eat(match self.bath {
            BathKind::SeparateBaths => 0,
            BathKind::CommonBath => 1,
        });
        h
    }
}

/// Bose occupancy 1/(e^r - 1) for r = hbar omega_m / kB T.
///
/// The exact-zero-temperature limit is not reachable through this map; it
/// is represented by [`Temperature::Zero`] upstream and yields n_th = 0
/// without evaluating the exponential.
pub fn thermal_occupancy(r: f64) -> Result<f64, ParamError> {
    if !r.is_finite() && !(r == f64::INFINITY) {
        return Err(ParamError::NonFinite("r"));
    }
    if r <= 0.0 {
        return Err(ParamError::NonPositiveRatio);
    }
    // expm1 keeps precision for small r where n_th ~ 1/r.
    Ok(1.0 / libm::expm1(r))
}

/// Convert laboratory parameters to the dimensionless set.
///
/// omega' = omega/kappa, Gamma' = gamma/kappa, K_c' = k/(m kappa^2),
/// Delta0' = Delta0/kappa and P' = 4 P_in omega_c / (m L_om^2 kappa^4).
/// The bath occupancy is evaluated at the mean mechanical frequency.
pub fn nondimensionalize(p: &PhysicalParams, bath: BathKind) -> Result<SystemParams, ParamError> {
    p.validate()?;
    let kappa = p.kappa;
    let n_th = match p.temperature {
        Temperature::Zero => 0.0,
        Temperature::Kelvin(t) => {
            let omega_mean = 0.5 * (p.omega_m1 + p.omega_m2);
            thermal_occupancy(HBAR * omega_mean / (KB * t))?
        }
    };
    let out = SystemParams {
        omega_m1: p.omega_m1 / kappa,
        omega_m2: p.omega_m2 / kappa,
        gamma: p.gamma / kappa,
        k_c: p.spring_k / (p.mass * kappa * kappa),
        delta0: p.delta0 / kappa,
        power: 4.0 * p.input_power * p.omega_c
            / (p.mass * p.length_om * p.length_om * kappa * kappa * kappa * kappa),
        n_th,
        bath,
    };
    out.validate()?;
    Ok(out)
}

/// Normal-mode frequencies of the bare mechanical pair.
pub fn normal_modes(p: &SystemParams) -> Result<NormalModes, ParamError> {
    let omega_m = p.omega_m()?;
    let omega_plus = omega_m;
    let omega_minus = libm::sqrt(omega_m * omega_m + 2.0 * p.k_c);
    Ok(NormalModes {
        omega_plus,
        omega_minus,
        omega_bar: 0.5 * (omega_plus + omega_minus),
    })
}

/// Relative linear optomechanical coupling g/omega_m at a fixed point.
///
/// In dimensional units g = (omega_c x_zpf / L_om) sqrt(0.5 <a^dag a>_st);
/// expressed through the dimensionless map (and omega_c ~ omega_L) this
/// collapses to sqrt(P |a_st|^2 / (2 omega_m^3)).
pub fn coupling_g(p: &SystemParams, fp: &FixedPoint) -> Result<f64, ParamError> {
    let omega_m = p.omega_m()?;
    let omega_cubed = omega_m * omega_m * omega_m;
    Ok(libm::sqrt(p.power * fp.photon_number() / (2.0 * omega_cubed)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;

    fn physical_template() -> PhysicalParams {
        PhysicalParams {
            mass: 1.0e-12,
            omega_m1: 2.0e6,
            omega_m2: 2.0e6,
            kappa: 4.0e6,
            gamma: 10.0,
            spring_k: 0.0,
            delta0: 4.0e6,
            input_power: 1.0e-3,
            omega_c: 1.2e15,
            omega_l: 1.2e15,
            length_om: 1.0e-6,
            temperature: Temperature::Zero,
        }
    }

    #[test]
    fn frequency_ratio_definition() {
        let mut p = physical_template();
        p.kappa = 2.0 * p.omega_m1;
        let s = nondimensionalize(&p, BathKind::SeparateBaths).unwrap();
        assert_abs_diff_eq!(s.omega_m1, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn zero_drive() {
        let mut p = physical_template();
        p.input_power = 0.0;
        let s = nondimensionalize(&p, BathKind::SeparateBaths).unwrap();
        assert_eq!(s.power, 0.0);
    }

    #[test]
    fn inverse_map_round_trip() {
        // Invert the dimensionless map for the target set
        // {omega_m = 3, Q_m = 1e5, P = 12} and check the round trip.
        let kappa = 5.0e6;
        let mass = 2.0e-12;
        let length_om = 0.8e-6;
        let omega_c = 1.2e15;
        let target_power = 12.0;
        let p = PhysicalParams {
            mass,
            omega_m1: 3.0 * kappa,
            omega_m2: 3.0 * kappa,
            kappa,
            gamma: 3.0 * kappa / 1.0e5,
            spring_k: 0.0,
            delta0: -3.0 * kappa,
            input_power: target_power * mass * length_om * length_om * kappa.powi(4)
                / (4.0 * omega_c),
            omega_c,
            omega_l: omega_c - 3.0 * kappa,
            length_om,
            temperature: Temperature::Zero,
        };
        let s = nondimensionalize(&p, BathKind::SeparateBaths).unwrap();
        assert_relative_eq!(s.omega_m1, 3.0, max_relative = 1e-12);
        assert_relative_eq!(s.q_factor(), 1.0e5, max_relative = 1e-12);
        assert_relative_eq!(s.power, 12.0, max_relative = 1e-12);
        assert_relative_eq!(s.delta0, -3.0, max_relative = 1e-12);
    }

    #[test]
    fn kappa_rescaling_leaves_dimensionless_set_unchanged() {
        let p = physical_template();
        let s0 = nondimensionalize(&p, BathKind::CommonBath).unwrap();
        let c = 3.7;
        let scaled = PhysicalParams {
            kappa: c * p.kappa,
            omega_m1: c * p.omega_m1,
            omega_m2: c * p.omega_m2,
            gamma: c * p.gamma,
            delta0: c * p.delta0,
            spring_k: c * c * p.spring_k,
            input_power: c.powi(4) * p.input_power,
            ..p.clone()
        };
        let s1 = nondimensionalize(&scaled, BathKind::CommonBath).unwrap();
        assert_relative_eq!(s0.omega_m1, s1.omega_m1, max_relative = 1e-12);
        assert_relative_eq!(s0.gamma, s1.gamma, max_relative = 1e-12);
        assert_relative_eq!(s0.delta0, s1.delta0, max_relative = 1e-12);
        assert_relative_eq!(s0.power, s1.power, max_relative = 1e-12);
    }

    #[test]
    fn rejects_non_positive_scales() {
        let mut p = physical_template();
        p.kappa = 0.0;
        assert!(matches!(
            nondimensionalize(&p, BathKind::SeparateBaths),
            Err(ParamError::NonPositive("kappa"))
        ));
        let mut p = physical_template();
        p.mass = -1.0;
        assert!(nondimensionalize(&p, BathKind::SeparateBaths).is_err());
        let mut p = physical_template();
        p.length_om = 0.0;
        assert!(nondimensionalize(&p, BathKind::SeparateBaths).is_err());
    }

    #[test]
    fn occupancy_reference_points() {
        // hbar omega_m / kB T = 0.1 -> n_th ~ 9.508
        assert_abs_diff_eq!(thermal_occupancy(0.1).unwrap(), 9.508331944775, epsilon = 1e-9);
        // = 0.01 -> n_th ~ 99.50
        assert_abs_diff_eq!(thermal_occupancy(0.01).unwrap(), 99.500833331945, epsilon = 1e-9);
        // ground-state bath
        assert_eq!(thermal_occupancy(f64::INFINITY).unwrap(), 0.0);
        assert!(thermal_occupancy(1e4).unwrap() < 1e-300);
        assert!(thermal_occupancy(0.0).is_err());
        assert!(thermal_occupancy(-1.0).is_err());
    }

    #[test]
    fn normal_mode_values() {
        let mut s = system_template();
        s.omega_m1 = 3.0;
        s.omega_m2 = 3.0;
        s.k_c = 0.0;
        let nm = normal_modes(&s).unwrap();
        assert_eq!((nm.omega_plus, nm.omega_minus, nm.omega_bar), (3.0, 3.0, 3.0));

        s.k_c = 9.0; // K_c / omega_m^2 = 1
        let nm = normal_modes(&s).unwrap();
        assert_relative_eq!(nm.omega_minus, libm::sqrt(27.0), max_relative = 1e-14);

        // Oracle: eigenfrequencies of the 2x2 stiffness matrix
        // [[w^2+Kc, -Kc], [-Kc, w^2+Kc]] are w^2 and w^2 + 2 Kc.
        let (w2, kc) = (9.0, 9.0);
        let tr = 2.0 * (w2 + kc);
        let det = (w2 + kc) * (w2 + kc) - kc * kc;
        let disc = libm::sqrt(tr * tr / 4.0 - det);
        let lam_lo = tr / 2.0 - disc;
        let lam_hi = tr / 2.0 + disc;
        assert_relative_eq!(libm::sqrt(lam_lo), nm.omega_plus, max_relative = 1e-12);
        assert_relative_eq!(libm::sqrt(lam_hi), nm.omega_minus, max_relative = 1e-12);

        s.omega_m2 = 3.1;
        assert!(normal_modes(&s).is_err());
    }

    #[test]
    fn normal_mode_splitting_small_coupling() {
        let mut s = system_template();
        s.omega_m1 = 3.0;
        s.omega_m2 = 3.0;
        for ratio in [1e-3, 1e-2, 0.05] {
            s.k_c = ratio * 9.0;
            let nm = normal_modes(&s).unwrap();
            let split = (nm.omega_minus - nm.omega_plus) / 3.0;
            assert_relative_eq!(split, ratio, max_relative = 2.0 * ratio);
        }
    }

    fn system_template() -> SystemParams {
        SystemParams {
            omega_m1: 1.0,
            omega_m2: 1.0,
            gamma: 0.01,
            k_c: 0.0,
            delta0: 1.0,
            power: 0.36,
            n_th: 0.0,
            bath: BathKind::SeparateBaths,
        }
    }

    proptest! {
        #[test]
        fn occupancy_strictly_decreasing(r in 1e-6f64..20.0) {
            let n0 = thermal_occupancy(r).unwrap();
            let n1 = thermal_occupancy(r * 1.01).unwrap();
            prop_assert!(n1 < n0);
        }

        #[test]
        fn occupancy_small_ratio_limit(r in 1e-9f64..1e-4) {
            let n = thermal_occupancy(r).unwrap();
            prop_assert!((n * r - 1.0).abs() < 1e-3);
        }

        #[test]
        fn normal_mode_square_difference(kc in 0.0f64..50.0, om in 0.1f64..10.0) {
            let mut s = system_template();
            s.omega_m1 = om;
            s.omega_m2 = om;
            s.k_c = kc;
            let nm = normal_modes(&s).unwrap();
            let diff = nm.omega_minus * nm.omega_minus - nm.omega_plus * nm.omega_plus;
            prop_assert!((diff - 2.0 * kc).abs() < 1e-9 * (1.0 + 2.0 * kc));
        }
    }
}
