//! Raw demand and population data.

use std::fs;
use std::path::Path;

use chrono::{Datelike, NaiveDate};

use crate::error::{Error, Result};
use crate::float::{cast, to_f64, Float};

/// Dated daily demand values plus annual population estimates.
///
/// Invariants, checked at construction: observation dates strictly
/// increasing, demands strictly positive, population years contiguous and
/// covering every observation year.
#[derive(Debug, Clone)]
pub struct DemandSeries<F> {
    observations: Vec<(NaiveDate, F)>,
    populations: Vec<(i32, u64)>,
    discarded: usize,
}

impl<F: Float> DemandSeries<F> {
    pub fn new(
        observations: Vec<(NaiveDate, F)>,
        populations: Vec<(i32, u64)>,
        discarded: usize,
    ) -> Result<Self> {
        if observations.is_empty() {
            return Err(Error::EmptySeries);
        }
        for pair in observations.windows(2) {
            if pair[1].0 <= pair[0].0 {
                return Err(Error::InvalidParam(format!(
                    "observation dates not strictly increasing at {}",
                    pair[1].0
                )));
            }
        }
        if let Some((date, d)) = observations.iter().find(|(_, d)| *d <= F::zero()) {
            return Err(Error::InvalidParam(format!(
                "non-positive demand {} on {date}",
                to_f64(*d)
            )));
        }
        for pair in populations.windows(2) {
            if pair[1].0 != pair[0].0 + 1 {
                return Err(Error::InvalidParam(format!(
                    "population year gap between {} and {}",
                    pair[0].0, pair[1].0
                )));
            }
        }
        let series = DemandSeries {
            observations,
            populations,
            discarded,
        };
        for (date, _) in &series.observations {
            if series.population_for_year(date.year()).is_none() {
                return Err(Error::InvalidParam(format!(
                    "no population estimate for observation year {}",
                    date.year()
                )));
            }
        }
        Ok(series)
    }

    pub fn observations(&self) -> &[(NaiveDate, F)] {
        &self.observations
    }

    pub fn populations(&self) -> &[(i32, u64)] {
        &self.populations
    }

    /// Number of input rows dropped because the demand value was missing
    /// or unparseable.
    pub fn discarded(&self) -> usize {
        self.discarded
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    pub fn population_for_year(&self, year: i32) -> Option<u64> {
        self.populations
            .iter()
            .find(|(y, _)| *y == year)
            .map(|(_, p)| *p)
    }

    /// Mean demand in megaliters.
    pub fn mean_demand(&self) -> F {
        let sum: F = self.observations.iter().map(|(_, d)| *d).sum();
        sum / cast(self.observations.len() as f64)
    }
}

/// Reads the demand and population CSV files.
///
/// Demand rows whose demand field is absent or unparseable are discarded
/// and counted (the gap they leave is handled later, when lag windows are
/// built); a malformed date is an error. The population file must parse
/// completely.
pub fn load_csv<F: Float>(
    demand_path: impl AsRef<Path>,
    population_path: impl AsRef<Path>,
) -> Result<DemandSeries<F>> {
    let demand_path = demand_path.as_ref();
    let population_path = population_path.as_ref();

    let demand_text = fs::read_to_string(demand_path)?;
    let mut observations = Vec::new();
    let mut discarded = 0usize;
    for (idx, line) in demand_text.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if idx == 0 {
            if line != "date,demand_ml" {
                return Err(csv_err(demand_path, line_no, "expected header `date,demand_ml`"));
            }
            continue;
        }
        let (date_field, demand_field) = match line.split_once(',') {
            Some(parts) => parts,
            None => return Err(csv_err(demand_path, line_no, "expected two comma-separated fields")),
        };
        let date = NaiveDate::parse_from_str(date_field.trim(), "%Y-%m-%d").map_err(|_| {
            csv_err(
                demand_path,
                line_no,
                &format!("malformed date `{}`", date_field.trim()),
            )
        })?;
        match demand_field.trim().parse::<f64>() {
            Ok(v) if v.is_finite() => observations.push((date, cast::<F>(v))),
            _ => discarded += 1,
        }
    }
    if observations.is_empty() {
        return Err(Error::EmptySeries);
    }

    let population_text = fs::read_to_string(population_path)?;
    let mut populations = Vec::new();
    for (idx, line) in population_text.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if idx == 0 {
            if line != "year,population" {
                return Err(csv_err(
                    population_path,
                    line_no,
                    "expected header `year,population`",
                ));
            }
            continue;
        }
        let (year_field, pop_field) = match line.split_once(',') {
            Some(parts) => parts,
            None => {
                return Err(csv_err(
                    population_path,
                    line_no,
                    "expected two comma-separated fields",
                ))
            }
        };
        let year: i32 = year_field.trim().parse().map_err(|_| {
            csv_err(
                population_path,
                line_no,
                &format!("malformed year `{}`", year_field.trim()),
            )
        })?;
        let population: u64 = pop_field.trim().parse().map_err(|_| {
            csv_err(
                population_path,
                line_no,
                &format!("malformed population `{}`", pop_field.trim()),
            )
        })?;
        populations.push((year, population));
    }

    DemandSeries::new(observations, populations, discarded)
}

fn csv_err(path: &Path, line: usize, message: &str) -> Error {
    Error::Csv {
        path: path.display().to_string(),
        line,
        message: message.to_string(),
    }
}

/// Writes the demand observations in the `date,demand_ml` format.
pub fn write_demand_csv<F: Float>(series: &DemandSeries<F>, path: impl AsRef<Path>) -> Result<()> {
    let mut out = String::from("date,demand_ml\n");
    for (date, demand) in series.observations() {
        out.push_str(&format!("{},{}\n", date.format("%Y-%m-%d"), to_f64(*demand)));
    }
    fs::write(path, out)?;
    Ok(())
}

/// Writes the population estimates in the `year,population` format.
pub fn write_population_csv<F: Float>(
    series: &DemandSeries<F>,
    path: impl AsRef<Path>,
) -> Result<()> {
    let mut out = String::from("year,population\n");
    for (year, population) in series.populations() {
        out.push_str(&format!("{year},{population}\n"));
    }
    fs::write(path, out)?;
    Ok(())
}
