//! Mapping between variable grains and layer balance periods.

use crate::model::{Dispatch, Resolution, TimeStructure};

/// Calendar facts shared by every variable of one model.
#[derive(Clone, Debug)]
pub struct Clock {
    pub n_td: usize,
    pub hours: usize,
    pub td_weight: Vec<f64>,
}

impl Clock {
    pub fn new(time: &TimeStructure) -> Self {
        Self {
            n_td: time.n_typical_days,
            hours: time.hours_per_day,
            td_weight: time.td_weight.clone(),
        }
    }

    pub fn slices(&self) -> usize {
        self.n_td * self.hours
    }

    pub fn hours_per_year(&self) -> f64 {
        self.hours as f64 * self.td_weight.iter().sum::<f64>()
    }

    /// Number of variables a quantity of this grain needs.
    pub fn var_count(&self, d: Dispatch) -> usize {
        match d {
            Dispatch::Hourly => self.slices(),
            Dispatch::Daily => self.n_td,
            Dispatch::Flat => 1,
        }
    }

    /// Balance periods of a layer.
    pub fn periods(&self, r: Resolution) -> usize {
        match r {
            Resolution::Hourly => self.slices(),
            Resolution::Daily => self.n_td,
            Resolution::Annual => 1,
        }
    }

    /// Hours per year during which variable `k` is active; multiplies a rate into annual energy.
    pub fn annual_weight(&self, d: Dispatch, k: usize) -> f64 {
        match d {
            Dispatch::Hourly => self.td_weight[k / self.hours],
            Dispatch::Daily => self.hours as f64 * self.td_weight[k],
            Dispatch::Flat => self.hours_per_year(),
        }
    }

    /// `(period, hours)` pairs: the energy variable `k` delivers into each
    /// balance period of a layer per unit rate.
    pub fn footprint(&self, d: Dispatch, k: usize, r: Resolution) -> Vec<(usize, f64)> {
        let h = self.hours as f64;
        match (d, r) {
            (Dispatch::Hourly, Resolution::Hourly) => vec![(k, 1.0)],
            (Dispatch::Hourly, Resolution::Daily) => vec![(k / self.hours, 1.0)],
            (Dispatch::Daily, Resolution::Hourly) => (0..self.hours).map(|hr| (k * self.hours + hr, 1.0)).collect(),
            (Dispatch::Daily, Resolution::Daily) => vec![(k, h)],
            (Dispatch::Flat, Resolution::Hourly) => (0..self.slices()).map(|s| (s, 1.0)).collect(),
            (Dispatch::Flat, Resolution::Daily) => (0..self.n_td).map(|td| (td, h)).collect(),
            (_, Resolution::Annual) => vec![(0, self.annual_weight(d, k))],
        }
    }

    /// Hours spanned by one balance period of a layer, per occurrence.
    pub fn period_hours(&self, r: Resolution) -> f64 {
        match r {
            Resolution::Hourly => 1.0,
            Resolution::Daily => self.hours as f64,
            Resolution::Annual => self.hours_per_year(),
        }
    }

    /// Slices covered by variable `k`.
    pub fn slices_of(&self, d: Dispatch, k: usize) -> std::ops::Range<usize> {
        match d {
            Dispatch::Hourly => k..k + 1,
            Dispatch::Daily => k * self.hours..(k + 1) * self.hours,
            Dispatch::Flat => 0..self.slices(),
        }
    }

    /// Mean of a per-slice series over the slices of variable `k`, weighted by occurrence.
    pub fn mean_over(&self, series: &[f64], d: Dispatch, k: usize) -> f64 {
        let range = self.slices_of(d, k);
        let (num, den) = range.fold((0.0, 0.0), |(n, w), s| {
            let wt = self.td_weight[s / self.hours];
            (n + wt * series[s], w + wt)
        });
        if den > 0.0 {
            num / den
        } else {
            0.0
        }
    }

    /// Per-slice energy shares of a profile so that the annual weighted sum is one.
    pub fn normalised_shares(&self, profile: Option<&[f64]>) -> Vec<f64> {
        let raw: Vec<f64> = match profile {
            Some(p) => p.to_vec(),
            None => vec![1.0; self.slices()],
        };
        let total: f64 = raw.iter().enumerate().map(|(s, v)| self.td_weight[s / self.hours] * v).sum();
        raw.into_iter().map(|v| v / total).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn clock() -> Clock {
        Clock {
            n_td: 2,
            hours: 3,
            td_weight: vec![100.0, 265.0],
        }
    }

    #[test]
    fn annual_footprints_agree_with_weights() {
        let c = clock();
        for d in [Dispatch::Hourly, Dispatch::Daily, Dispatch::Flat] {
            let total: f64 = (0..c.var_count(d))
                .map(|k| c.footprint(d, k, Resolution::Annual)[0].1)
                .sum();
            // Every grain sums to the full year when all its variables run at unit rate.
            assert_eq!(total, c.hours_per_year());
        }
    }

    #[test]
    fn daily_footprint_on_hourly_layer_repeats() {
        let c = clock();
        assert_eq!(c.footprint(Dispatch::Daily, 1, Resolution::Hourly), vec![(3, 1.0), (4, 1.0), (5, 1.0)]);
        assert_eq!(c.footprint(Dispatch::Hourly, 4, Resolution::Daily), vec![(1, 1.0)]);
    }

    #[test]
    fn shares_sum_to_one_over_the_year() {
        let c = clock();
        let s = c.normalised_shares(Some(&[1.0, 2.0, 3.0, 0.0, 1.0, 1.0]));
        let total: f64 = s.iter().enumerate().map(|(i, v)| c.td_weight[i / 3] * v).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }
}
