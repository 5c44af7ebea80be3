//! Synthetic demand-series generation.
//!
//! Stands in for the proprietary utility data: an exponential growth trend
//! modulated by weekly and annual sinusoids plus Gaussian noise, with
//! populations growing geometrically year over year.

use chrono::{Datelike, NaiveDate};

use super::series::DemandSeries;
use crate::error::{Error, Result};
use crate::float::{cast, Float};
use crate::numerics::Rng;

/// Parameters of [`synthesize_series`].
#[derive(Debug, Clone, PartialEq)]
pub struct SynthParams {
    pub days: usize,
    pub base_demand: f64,
    /// Annual growth rate of the demand trend.
    pub growth: f64,
    pub weekly_amp: f64,
    pub annual_amp: f64,
    pub noise_sd: f64,
    pub pop_start: u64,
    /// Annual population growth rate.
    pub pop_growth_rate: f64,
    pub start_date: NaiveDate,
}

impl Default for SynthParams {
    fn default() -> Self {
        SynthParams {
            days: 3473,
            base_demand: 2700.0,
            growth: 0.02,
            weekly_amp: 0.08,
            annual_amp: 0.12,
            noise_sd: 25.0,
            pop_start: 7_830_904,
            pop_growth_rate: 0.0313,
            start_date: NaiveDate::from_ymd_opt(1997, 1, 4).expect("valid date"),
        }
    }
}

/// Generates a demand series:
/// `demand(t) = base * (1+growth)^(t/365) * (1 + weekly_amp*sin(2*pi*t/7)
/// + annual_amp*sin(2*pi*t/365.25)) + noise_sd * N(0,1)`,
/// with populations growing geometrically from `pop_start`.
pub fn synthesize_series<F: Float>(rng: &mut Rng, params: &SynthParams) -> Result<DemandSeries<F>> {
    if params.days < 30 {
        return Err(Error::InvalidParam(format!(
            "need at least 30 days, got {}",
            params.days
        )));
    }
    if params.weekly_amp < 0.0 || params.annual_amp < 0.0 || params.noise_sd < 0.0 {
        return Err(Error::InvalidParam(
            "amplitudes and noise must be nonnegative".into(),
        ));
    }

    let tau = std::f64::consts::TAU;
    let mut observations = Vec::with_capacity(params.days);
    for t in 0..params.days {
        let date = params.start_date + chrono::Days::new(t as u64);
        let tf = t as f64;
        let trend = params.base_demand * (1.0 + params.growth).powf(tf / 365.0);
        let seasonal =
            1.0 + params.weekly_amp * (tau * tf / 7.0).sin() + params.annual_amp * (tau * tf / 365.25).sin();
        let demand = trend * seasonal + params.noise_sd * rng.next_normal();
        if demand <= 0.0 {
            return Err(Error::InvalidParam(format!(
                "parameters produce nonpositive demand ({demand:.3}) on day {t}"
            )));
        }
        observations.push((date, cast::<F>(demand)));
    }

    let first_year = params.start_date.year();
    let last_year = observations.last().expect("days >= 30").0.year();
    let populations = (first_year..=last_year)
        .map(|year| {
            let k = (year - first_year) as f64;
            let population = (params.pop_start as f64 * (1.0 + params.pop_growth_rate).powf(k))
                .round() as u64;
            (year, population)
        })
        .collect();

    DemandSeries::new(observations, populations, 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_parameters_give_constant_series() {
        let params = SynthParams {
            days: 40,
            growth: 0.0,
            weekly_amp: 0.0,
            annual_amp: 0.0,
            noise_sd: 0.0,
            ..SynthParams::default()
        };
        let series = synthesize_series::<f64>(&mut Rng::new(1), &params).unwrap();
        assert!(series
            .observations()
            .iter()
            .all(|(_, d)| (*d - 2700.0).abs() < 1e-9));
    }

    #[test]
    fn population_grows_geometrically() {
        let params = SynthParams {
            days: 800, // spans three calendar years from 1997-01-04
            ..SynthParams::default()
        };
        let series = synthesize_series::<f64>(&mut Rng::new(1), &params).unwrap();
        assert_eq!(series.population_for_year(1997), Some(7_830_904));
        // 7_830_904 * 1.0313 = 8_076_011.30, rounded.
        assert_eq!(series.population_for_year(1998), Some(8_076_011));
    }

    #[test]
    fn same_seed_reproduces_the_series() {
        let params = SynthParams::default();
        let a = synthesize_series::<f64>(&mut Rng::new(99), &params).unwrap();
        let b = synthesize_series::<f64>(&mut Rng::new(99), &params).unwrap();
        assert_eq!(a.observations(), b.observations());
        assert_eq!(a.populations(), b.populations());
    }

    #[test]
    fn nonpositive_demand_is_rejected() {
        let params = SynthParams {
            days: 40,
            base_demand: 1.0,
            noise_sd: 500.0,
            ..SynthParams::default()
        };
        assert!(synthesize_series::<f64>(&mut Rng::new(5), &params).is_err());
    }

    #[test]
    fn too_few_days_rejected() {
        let params = SynthParams {
            days: 10,
            ..SynthParams::default()
        };
        assert!(synthesize_series::<f64>(&mut Rng::new(5), &params).is_err());
    }

    #[test]
    fn default_span_matches_expected_length() {
        let series = synthesize_series::<f64>(&mut Rng::new(0), &SynthParams::default()).unwrap();
        assert_eq!(series.len(), 3473);
        let last = series.observations().last().unwrap().0;
        assert_eq!(last, NaiveDate::from_ymd_opt(2006, 7, 8).unwrap());
    }
}
