//! Good/Bad classification of temporal networks.
//!
//! Each network contributes one empirical CDF per structural parameter. For
//! every parameter the training networks are split into two clusters by
//! average-linkage agglomerative clustering on the Kolmogorov–Smirnov
//! distance, and the cluster whose values better match the desired direction
//! is labelled Good. Unseen networks are assigned per parameter to the
//! cluster with the nearer centroid CDF.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{map_slice, Execution};
use crate::params::{ParamSeries, Parameter};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalCdf {
    /// Distinct sample values, ascending.
    pub support: Vec<f64>,
    /// Fraction of samples `<= support[i]`.
    pub cumulative: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn from_samples(samples: &[f64]) -> Result<EmpiricalCdf> {
        if samples.is_empty() {
            return Err(Error::Empty("cannot build a CDF from no samples"));
        }
        if samples.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("CDF samples must be finite".into()));
        }
        let mut sorted = samples.to_vec();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len() as f64;
        let mut support = Vec::new();
        let mut cumulative = Vec::new();
        for (i, &x) in sorted.iter().enumerate() {
            if support.last() == Some(&x) {
                *cumulative.last_mut().unwrap() = (i + 1) as f64 / n;
            } else {
                support.push(x);
                cumulative.push((i + 1) as f64 / n);
            }
        }
        Ok(EmpiricalCdf { support, cumulative })
    }

    /// Right-continuous step function value at `x`.
    pub fn eval(&self, x: f64) -> f64 {
        match self.support.partition_point(|&s| s <= x) {
            0 => 0.0,
            i => self.cumulative[i - 1],
        }
    }

    /// Pointwise mean of several CDFs over the union of their supports.
    pub fn centroid(members: &[&EmpiricalCdf]) -> Result<EmpiricalCdf> {
        if members.is_empty() {
            return Err(Error::Empty("centroid of no CDFs"));
        }
        let support = merged_support(members.iter().copied());
        let k = members.len() as f64;
        let cumulative = support
            .iter()
            .map(|&x| members.iter().map(|c| c.eval(x)).sum::<f64>() / k)
            .collect();
        Ok(EmpiricalCdf { support, cumulative })
    }
}

fn merged_support<'a>(cdfs: impl Iterator<Item = &'a EmpiricalCdf>) -> Vec<f64> {
    let mut all: Vec<f64> = cdfs.flat_map(|c| c.support.iter().copied()).collect();
    all.sort_by(f64::total_cmp);
    all.dedup();
    all
}

/// Kolmogorov–Smirnov D statistic: sup |F_a(x) - F_b(x)|.
pub fn ks_distance(a: &EmpiricalCdf, b: &EmpiricalCdf) -> f64 {
    merged_support([a, b].into_iter())
        .into_iter()
        .map(|x| (a.eval(x) - b.eval(x)).abs())
        .fold(0.0, f64::max)
}

/// Splits the named CDFs into two clusters with average linkage.
///
/// Networks are processed in id order; among equally distant cluster pairs
/// the one with the lexicographically smallest `(min id, min id)` merges
/// first. Returned clusters are id-sorted and ordered by their first member.
pub fn cluster_parameter(cdfs: &[(String, EmpiricalCdf)]) -> Result<[Vec<String>; 2]> {
    if cdfs.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "clustering needs at least 2 networks, got {}",
            cdfs.len()
        )));
    }
    let mut order: Vec<usize> = (0..cdfs.len()).collect();
    order.sort_by(|&a, &b| cdfs[a].0.cmp(&cdfs[b].0));
    let items: Vec<&(String, EmpiricalCdf)> = order.iter().map(|&i| &cdfs[i]).collect();
    let n = items.len();
    let mut dist = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = ks_distance(&items[i].1, &items[j].1);
            dist[i][j] = d;
            dist[j][i] = d;
        }
    }

    // members kept sorted, clusters kept ordered by first member
    let mut clusters: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    while clusters.len() > 2 {
        let mut best: Option<(f64, usize, usize)> = None;
        for a in 0..clusters.len() {
            for b in (a + 1)..clusters.len() {
                let total: f64 = clusters[a]
                    .iter()
                    .flat_map(|&i| clusters[b].iter().map(move |&j| (i, j)))
                    .map(|(i, j)| dist[i][j])
                    .sum();
                let avg = total / (clusters[a].len() * clusters[b].len()) as f64;
                // strict < keeps the first (lexicographically smallest) pair on ties
                if best.is_none_or(|(d, _, _)| avg < d) {
                    best = Some((avg, a, b));
                }
            }
        }
        let (_, a, b) = best.unwrap();
        let merged = clusters.remove(b);
        clusters[a].extend(merged);
        clusters[a].sort_unstable();
    }
    let names = |c: &Vec<usize>| c.iter().map(|&i| items[i].0.clone()).collect::<Vec<_>>();
    Ok([names(&clusters[0]), names(&clusters[1])])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Label {
    G,
    B,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::G => "G",
            Label::B => "B",
        })
    }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// Labels two clusters given each cluster's per-member mean parameter values.
/// Returns the label of the first and second cluster.
pub fn label_clusters(first: &[f64], second: &[f64], param: Parameter) -> Result<[Label; 2]> {
    if first.is_empty() || second.is_empty() {
        return Err(Error::InvalidArgument("cannot label an empty cluster".into()));
    }
    let (m1, m2) = (mean(first), mean(second));
    let (a, b) = if m1 != m2 {
        (m1, m2)
    } else {
        let (d1, d2) = (median(first), median(second));
        if d1 == d2 {
            return Err(Error::LabelTie(param.to_string()));
        }
        (d1, d2)
    };
    let first_good = if param.higher_is_better() { a > b } else { a < b };
    Ok(if first_good {
        [Label::G, Label::B]
    } else {
        [Label::B, Label::G]
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterEntry {
    pub members: Vec<String>,
    pub centroid: EmpiricalCdf,
    pub label: Label,
    /// Mean of the members' mean parameter values.
    pub mean_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterModel {
    pub parameter: Parameter,
    pub clusters: [ClusterEntry; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterModel {
    pub parameters: Vec<ParameterModel>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Good,
    Bad,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Category {
    /// Ordered (EF, CFX, ED, CV).
    pub labels: [Label; 4],
    pub verdict: Verdict,
    /// Parameters whose centroid distances tied (assigned B).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub equidistant: Vec<Parameter>,
}

impl Category {
    /// At least as many G labels as B labels makes the network Good.
    pub fn from_labels(labels: [Label; 4]) -> Category {
        let good = labels.iter().filter(|&&l| l == Label::G).count();
        Category {
            labels,
            verdict: if good >= 2 { Verdict::Good } else { Verdict::Bad },
            equidistant: Vec::new(),
        }
    }

    pub fn code(&self) -> String {
        self.labels.iter().map(Label::to_string).collect()
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.code())
    }
}

fn parameter_model(param: Parameter, networks: &[(String, ParamSeries)]) -> Result<ParameterModel> {
    let mut cdfs = Vec::with_capacity(networks.len());
    for (id, series) in networks {
        cdfs.push((id.clone(), series.cdf(param)?));
    }
    let clusters = cluster_parameter(&cdfs)?;
    let member_means = |members: &[String]| -> Vec<f64> {
        members
            .iter()
            .map(|m| {
                let (_, s) = networks.iter().find(|(id, _)| id == m).unwrap();
                mean(&s.values(param))
            })
            .collect()
    };
    let means = [member_means(&clusters[0]), member_means(&clusters[1])];
    let labels = label_clusters(&means[0], &means[1], param)?;
    let entry = |i: usize| -> Result<ClusterEntry> {
        let members: Vec<&EmpiricalCdf> = clusters[i]
            .iter()
            .map(|m| &cdfs.iter().find(|(id, _)| id == m).unwrap().1)
            .collect();
        Ok(ClusterEntry {
            members: clusters[i].clone(),
            centroid: EmpiricalCdf::centroid(&members)?,
            label: labels[i],
            mean_value: mean(&means[i]),
        })
    };
    Ok(ParameterModel {
        parameter: param,
        clusters: [entry(0)?, entry(1)?],
    })
}

impl ClusterModel {
    /// Trains on named parameter series; ids must be unique.
    pub fn train(networks: &[(String, ParamSeries)]) -> Result<ClusterModel> {
        let mut ids: Vec<&String> = networks.iter().map(|(id, _)| id).collect();
        ids.sort();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument("duplicate network id".into()));
        }
        let parameters = map_slice(Execution::default(), &Parameter::ALL, |&p| {
            parameter_model(p, networks)
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
        Ok(ClusterModel { parameters })
    }

    pub fn parameter(&self, p: Parameter) -> &ParameterModel {
        self.parameters
            .iter()
            .find(|m| m.parameter == p)
            .expect("model covers every parameter")
    }

    /// The category a training network received from its own clusters.
    pub fn training_category(&self, id: &str) -> Option<Category> {
        let mut labels = [Label::B; 4];
        for (slot, p) in labels.iter_mut().zip(Parameter::ALL) {
            *slot = self
                .parameter(p)
                .clusters
                .iter()
                .find(|c| c.members.iter().any(|m| m == id))?
                .label;
        }
        Some(Category::from_labels(labels))
    }
}

/// Nearest-centroid assignment of an unseen network.
pub fn rocchio_assign(model: &ClusterModel, series: &ParamSeries) -> Result<Category> {
    let mut labels = [Label::B; 4];
    let mut equidistant = Vec::new();
    for (slot, p) in labels.iter_mut().zip(Parameter::ALL) {
        let values = series.values(p);
        if values.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "parameter {p} has {} observation(s); need at least 2",
                values.len()
            )));
        }
        let cdf = EmpiricalCdf::from_samples(&values)?;
        let pm = model.parameter(p);
        let d0 = ks_distance(&cdf, &pm.clusters[0].centroid);
        let d1 = ks_distance(&cdf, &pm.clusters[1].centroid);
        *slot = if d0 < d1 {
            pm.clusters[0].label
        } else if d1 < d0 {
            pm.clusters[1].label
        } else {
            log::warn!("{p}: equidistant from both centroids, assigning B");
            equidistant.push(p);
            Label::B
        };
    }
    let mut category = Category::from_labels(labels);
    category.equidistant = equidistant;
    Ok(category)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cdf(xs: &[f64]) -> EmpiricalCdf {
        EmpiricalCdf::from_samples(xs).unwrap()
    }

    #[test]
    fn cdf_from_samples() {
        let c = cdf(&[0.3, 0.1, 0.3, 0.5]);
        assert_eq!(c.support, vec![0.1, 0.3, 0.5]);
        assert_eq!(c.cumulative, vec![0.25, 0.75, 1.0]);
        assert_eq!(c.eval(0.0), 0.0);
        assert_eq!(c.eval(0.3), 0.75);
        assert_eq!(c.eval(0.4), 0.75);
        assert_eq!(c.eval(9.0), 1.0);
        assert!(EmpiricalCdf::from_samples(&[]).is_err());
        assert!(EmpiricalCdf::from_samples(&[f64::NAN]).is_err());
    }

    #[test]
    fn ks_examples() {
        assert_eq!(ks_distance(&cdf(&[0.2, 0.4]), &cdf(&[0.4, 0.2])), 0.0);
        assert_eq!(ks_distance(&cdf(&[0.0; 3]), &cdf(&[1.0; 3])), 1.0);
        // F_a = (.5, 1, 1), F_b = (.5, .5, 1) at x = 1, 2, 3
        assert_eq!(ks_distance(&cdf(&[1.0, 2.0]), &cdf(&[1.0, 3.0])), 0.5);
    }

    #[test]
    fn centroid_is_pointwise_mean() {
        let a = cdf(&[1.0]);
        let b = cdf(&[2.0]);
        let c = EmpiricalCdf::centroid(&[&a, &b]).unwrap();
        assert_eq!(c.support, vec![1.0, 2.0]);
        assert_eq!(c.cumulative, vec![0.5, 1.0]);
    }

    fn named(entries: &[(&str, &[f64])]) -> Vec<(String, EmpiricalCdf)> {
        entries.iter().map(|(n, xs)| (n.to_string(), cdf(xs))).collect()
    }

    #[test]
    fn two_networks_are_singletons() {
        let got = cluster_parameter(&named(&[("b", &[0.1]), ("a", &[0.9])])).unwrap();
        assert_eq!(got, [vec!["a".to_string()], vec!["b".to_string()]]);
        assert!(cluster_parameter(&named(&[("a", &[0.1])])).is_err());
    }

    #[test]
    fn three_networks_merge_the_close_pair() {
        // d(A,B) = 0.1, d(A,C) = d(B,C) = 0.9 via 10-sample CDFs
        let a: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let mut b = a.clone();
        b[9] = 100.0; // shifts one tenth of the mass
        let c: Vec<f64> = (0..10).map(|i| if i == 0 { 5.5 } else { 200.0 + i as f64 }).collect();
        let set = named(&[("A", &a), ("B", &b), ("C", &c)]);
        assert!((ks_distance(&set[0].1, &set[1].1) - 0.1).abs() < 1e-12);
        assert!((ks_distance(&set[0].1, &set[2].1) - 0.9).abs() < 1e-12);
        assert!((ks_distance(&set[1].1, &set[2].1) - 0.9).abs() < 1e-12);
        let got = cluster_parameter(&set).unwrap();
        assert_eq!(got, [vec!["A".to_string(), "B".to_string()], vec!["C".to_string()]]);
    }

    #[test]
    fn two_tight_pairs() {
        let set = named(&[
            ("n1", &[0.10, 0.11]),
            ("n2", &[0.90, 0.91]),
            ("n3", &[0.10, 0.12]),
            ("n4", &[0.90, 0.92]),
        ]);
        let got = cluster_parameter(&set).unwrap();
        assert_eq!(got[0], vec!["n1", "n3"]);
        assert_eq!(got[1], vec!["n2", "n4"]);
    }

    #[test]
    fn labelling_follows_desirability() {
        assert_eq!(label_clusters(&[0.9], &[0.3], Parameter::Ef).unwrap(), [Label::G, Label::B]);
        assert_eq!(label_clusters(&[0.05], &[0.4], Parameter::Cfx).unwrap(), [Label::G, Label::B]);
        assert_eq!(label_clusters(&[0.1], &[0.8], Parameter::Cv).unwrap(), [Label::B, Label::G]);
        // equal means, medians decide
        assert_eq!(
            label_clusters(&[0.0, 0.5, 1.0], &[0.2, 0.3, 1.0], Parameter::Ed).unwrap(),
            [Label::G, Label::B]
        );
        assert!(matches!(
            label_clusters(&[0.5], &[0.5], Parameter::Ed),
            Err(Error::LabelTie(_))
        ));
    }

    #[test]
    fn verdict_majority_with_ties_good() {
        use Label::*;
        assert_eq!(Category::from_labels([G, G, B, B]).verdict, Verdict::Good);
        assert_eq!(Category::from_labels([B, G, B, B]).verdict, Verdict::Bad);
        assert_eq!(Category::from_labels([G, G, B, G]).code(), "GGBG");
    }
}
