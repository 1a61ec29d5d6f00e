use std::io::Read;

use chrono::{Datelike, NaiveDate};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeeklyPrice {
    pub date: NaiveDate,
    pub price_eur_per_t: f64,
}

/// Read `date,price_eur_t` rows (ISO dates).
pub fn load_weekly_prices<R: Read>(source: R) -> Result<Vec<WeeklyPrice>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(source);
    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row?;
        let d = row.get(0).unwrap_or("");
        let p = row.get(1).unwrap_or("");
        let date = NaiveDate::parse_from_str(d.get(0..10).unwrap_or(d), "%Y-%m-%d")
            .map_err(|_| Error::Parse(format!("bad date '{d}' in carbon prices")))?;
        let price_eur_per_t = p
            .parse()
            .map_err(|_| Error::Parse(format!("bad price '{p}' in carbon prices")))?;
        out.push(WeeklyPrice {
            date,
            price_eur_per_t,
        });
    }
    Ok(out)
}

/// Mean of the weekly allowance prices dated within `year`.
pub fn annual_carbon_price(prices: &[WeeklyPrice], year: i32) -> Result<f64> {
    let in_year: Vec<f64> = prices
        .iter()
        .filter(|p| p.date.year() == year)
        .map(|p| p.price_eur_per_t)
        .collect();
    if in_year.is_empty() {
        return Err(Error::Missing(format!(
            "no carbon prices for {year}; supply an explicit carbon price"
        )));
    }
    Ok(in_year.iter().sum::<f64>() / in_year.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn week(y: i32, m: u32, d: u32, p: f64) -> WeeklyPrice {
        WeeklyPrice {
            date: NaiveDate::from_ymd_opt(y, m, d).unwrap(),
            price_eur_per_t: p,
        }
    }

    #[test]
    fn constant_price() {
        let prices = vec![week(2019, 3, 4, 10.0); 52];
        assert_eq!(annual_carbon_price(&prices, 2019).unwrap(), 10.0);
    }

    #[test]
    fn mean_of_two_weeks_ignores_other_years() {
        let prices = vec![
            week(2019, 1, 7, 10.0),
            week(2019, 6, 3, 30.0),
            week(2018, 12, 31, 99.0),
        ];
        assert_eq!(annual_carbon_price(&prices, 2019).unwrap(), 20.0);
    }

    #[test]
    fn empty_year_requires_override() {
        let err = annual_carbon_price(&[week(2018, 1, 1, 5.0)], 2019).unwrap_err();
        assert!(err.to_string().contains("explicit carbon price"));
    }

    #[test]
    fn parses_csv() {
        let csv = "date,price_eur_t\n2019-01-07,22.5\n2019-01-14,23.5\n";
        let p = load_weekly_prices(csv.as_bytes()).unwrap();
        assert_eq!(annual_carbon_price(&p, 2019).unwrap(), 23.0);
    }
}
