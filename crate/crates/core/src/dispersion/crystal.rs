use super::derivative::Dispersive;
use super::model::{angle_index_jet, DispersionData, Form, IndexJet, IndexModel, Polarization};
use crate::error::{Error, Result};

/// Direction of the pump relative to the optic axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PumpAngle {
    /// Collinear type-I angle solved from `n_e(theta, l_p) = n_o(2 l_p)`.
    PhaseMatched,
    /// Fixed angle, radians.
    Fixed(f64),
}

/// A nonlinear crystal: length plus dispersion. The pump is the
/// extraordinary wave, the down-converted photons are ordinary (type I).
/// Without an extraordinary model the crystal is treated as isotropic.
#[derive(Debug, Clone, PartialEq)]
pub struct Crystal {
    name: String,
    length_m: f64,
    ordinary: IndexModel,
    extraordinary: Option<IndexModel>,
    pump_angle: PumpAngle,
}

/// LiIO3 four-term dispersion (ordinary, extraordinary), wavelength in um.
/// Coefficients as tabulated in Dmitriev, Gurzadyan & Nikogosyan,
/// *Handbook of Nonlinear Optical Crystals* (Springer), lithium iodate entry.
pub const LIIO3_ORDINARY: [f64; 4] = [3.415716, 0.047031, 0.035306, 0.008801];
pub const LIIO3_EXTRAORDINARY: [f64; 4] = [2.918692, 0.035145, 0.028224, 0.003641];
pub const LIIO3_WINDOW_NM: (f64, f64) = (300.0, 5500.0);

impl Crystal {
    pub fn new(
        name: impl Into<String>,
        length_m: f64,
        ordinary: IndexModel,
        extraordinary: Option<IndexModel>,
    ) -> Result<Self> {
        if !(length_m.is_finite() && length_m > 0.0) {
            return Err(Error::invalid(format!("crystal length {length_m} m must be positive")));
        }
        Ok(Self {
            name: name.into(),
            length_m,
            ordinary,
            extraordinary,
            pump_angle: PumpAngle::PhaseMatched,
        })
    }

    pub fn from_dispersion(data: DispersionData, length_m: f64) -> Result<Self> {
        let name = data.name.unwrap_or_else(|| "custom".to_string());
        Self::new(name, length_m, data.ordinary, data.extraordinary)
    }

    pub fn lithium_iodate(length_m: f64) -> Self {
        let hb = |c: [f64; 4]| {
            IndexModel::new(Form::Handbook { a: c[0], b: c[1], c: c[2], d: c[3] }, LIIO3_WINDOW_NM)
                .expect("static window")
        };
        Self::new("LiIO3", length_m, hb(LIIO3_ORDINARY), Some(hb(LIIO3_EXTRAORDINARY)))
            .expect("caller passes a positive length")
    }

    /// Dispersionless test crystal (`n = 1` everywhere).
    pub fn vacuum(length_m: f64) -> Self {
        Self::new("vacuum", length_m, IndexModel::vacuum(), None)
            .expect("caller passes a positive length")
    }

    pub fn with_pump_angle(mut self, angle: PumpAngle) -> Self {
        self.pump_angle = angle;
        self
    }

    pub fn with_length(mut self, length_m: f64) -> Result<Self> {
        if !(length_m.is_finite() && length_m > 0.0) {
            return Err(Error::invalid(format!("crystal length {length_m} m must be positive")));
        }
        self.length_m = length_m;
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn length_m(&self) -> f64 {
        self.length_m
    }

    pub fn pump_angle(&self) -> PumpAngle {
        self.pump_angle
    }

    pub fn ordinary(&self) -> &IndexModel {
        &self.ordinary
    }

    pub fn extraordinary(&self) -> Option<&IndexModel> {
        self.extraordinary.as_ref()
    }

    /// Principal index for the given polarization.
    pub fn refractive_index(&self, lambda_nm: f64, pol: Polarization) -> Result<f64> {
        match pol {
            Polarization::Ordinary => self.ordinary.index(lambda_nm),
            Polarization::Extraordinary => self.extraordinary.as_ref().unwrap_or(&self.ordinary).index(lambda_nm),
        }
    }

    /// Collinear type-I phase-matching angle for the pump wavelength, in
    /// closed form:
    /// `sin^2 theta = (n_o(p)^-2 - n_o(s)^-2) / (n_o(p)^-2 - n_e(p)^-2)`.
    pub fn phase_matching_angle(&self, pump_lambda_nm: f64) -> Result<f64> {
        let e = self.extraordinary.as_ref().ok_or_else(|| {
            Error::Regime(format!("crystal {} is isotropic; no type-I phase matching", self.name))
        })?;
        let nop = self.ordinary.index(pump_lambda_nm)?;
        let nep = e.index(pump_lambda_nm)?;
        let nos = self.ordinary.index(2.0 * pump_lambda_nm)?;
        let inv = |n: f64| 1.0 / (n * n);
        let s2 = (inv(nop) - inv(nos)) / (inv(nop) - inv(nep));
        if !(0.0..=1.0).contains(&s2) {
            return Err(Error::Regime(format!(
                "no collinear type-I phase matching in {} at {pump_lambda_nm} nm (sin^2 = {s2:.4})",
                self.name
            )));
        }
        Ok(s2.sqrt().asin())
    }

    /// The medium seen by the pump: the extraordinary wave at the configured
    /// angle, or the ordinary index for isotropic crystals. Returns the
    /// angle used, if any.
    pub fn pump_medium(&self, pump_lambda_nm: f64) -> Result<(PumpMedium<'_>, Option<f64>)> {
        match &self.extraordinary {
            None => Ok((PumpMedium::Isotropic(&self.ordinary), None)),
            Some(e) => {
                let theta = match self.pump_angle {
                    PumpAngle::PhaseMatched => self.phase_matching_angle(pump_lambda_nm)?,
                    PumpAngle::Fixed(t) => t,
                };
                Ok((PumpMedium::Extraordinary { o: &self.ordinary, e, theta }, Some(theta)))
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub enum PumpMedium<'a> {
    Isotropic(&'a IndexModel),
    Extraordinary { o: &'a IndexModel, e: &'a IndexModel, theta: f64 },
}

impl Dispersive for PumpMedium<'_> {
    fn jet(&self, lambda_nm: f64) -> Result<IndexJet> {
        match *self {
            PumpMedium::Isotropic(m) => m.jet(lambda_nm),
            PumpMedium::Extraordinary { o, e, theta } => {
                Ok(angle_index_jet(o.jet(lambda_nm)?, e.jet(lambda_nm)?, theta))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Handbook reference values for LiIO3 at 1064 nm: n_o = 1.8571, n_e = 1.7165.
    #[test]
    fn lithium_iodate_reference_indices() {
        let x = Crystal::lithium_iodate(0.01);
        let no = x.refractive_index(1064.0, Polarization::Ordinary).unwrap();
        let ne = x.refractive_index(1064.0, Polarization::Extraordinary).unwrap();
        assert!((no - 1.8571).abs() < 1e-4, "{no}");
        assert!((ne - 1.7165).abs() < 1e-4, "{ne}");
    }

    #[test]
    fn phase_matching_closes_the_index_match() {
        let x = Crystal::lithium_iodate(0.01);
        let theta = x.phase_matching_angle(397.5).unwrap();
        let (pump, _) = x.pump_medium(397.5).unwrap();
        let np = pump.index(397.5).unwrap();
        let ns = x.refractive_index(795.0, Polarization::Ordinary).unwrap();
        assert!((np - ns).abs() < 1e-12, "{np} {ns}");
        // type-I angle for ~800 nm doubling in LiIO3 is a little above 40 degrees
        assert!((40f64.to_radians()..46f64.to_radians()).contains(&theta), "{}", theta.to_degrees());
    }

    #[test]
    fn isotropic_crystal_has_no_phase_matching() {
        assert!(matches!(Crystal::vacuum(0.01).phase_matching_angle(400.0), Err(Error::Regime(_))));
    }

    #[test]
    fn rejects_nonpositive_length() {
        assert!(Crystal::new("x", 0.0, IndexModel::vacuum(), None).is_err());
        assert!(Crystal::vacuum(0.01).with_length(-1.0).is_err());
    }
}
