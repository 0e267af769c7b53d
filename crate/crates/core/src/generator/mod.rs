//! Synthetic imbalanced streams with local difficulty factors and drift.
//!
//! Minority sub-clusters are hyperspheres of radius [`RADIUS`]. Safe minority
//! examples fill the inner core; borderline examples come in small mixed
//! sites in the shell around it, each site pairing its minority members with
//! as many majority companions; rare examples come in pairs placed deep in
//! majority territory, each pair surrounded by its own majority companions.
//! Majority examples are uniform over the unit cube with the cores cut out.
//! Class ratio, type shares and sub-cluster positions move linearly across
//! the scenario's drift window.

mod labeler;
pub mod scenario;
mod validate;

use std::collections::VecDeque;
use std::io::{self, Write};

use rand::Rng;
use rand_distr::StandardNormal;

use crate::stream::{squared_distance, ClassLabel, Example, RandomSource};

pub use labeler::{label_example_type, type_histogram, ExampleType, TypeHistogram, LABELER_K};
pub use scenario::{
    drift_progress, factor_category, parse_scenario, ClusterMotion, DriftParams, Factor, ScenarioSpec, TypeProfile,
};
pub use validate::{validate_scenario, PhaseReport, ValidationReport, MIN_VALIDATION_SAMPLE};

pub const RADIUS: f64 = 0.15;
/// Safe examples lie within this fraction of the radius.
pub const SAFE_CORE: f64 = 0.7;
/// Borderline sites lie in this radial band (fractions of the radius).
pub const BORDER_SHELL: (f64, f64) = (0.9, 1.3);
/// Rare groups keep at least this many radii from every sub-cluster center.
pub const RARE_CLEARANCE: f64 = 2.0;
pub const RARE_SPREAD: f64 = 0.02;
pub const RARE_GROUP_SIZE: usize = 2;
/// Majority companions around each rare group, enough to fill its members'
/// neighbourhoods.
pub const RARE_COMPANIONS: usize = 4;
pub const BORDER_SPREAD: f64 = 0.01;
/// Minority members of one borderline site; each brings one majority companion.
pub const BORDER_SITE_SIZE: usize = 3;
pub const SPLIT_DISPLACEMENT: f64 = 0.25;
pub const MOVE_DISTANCE: f64 = 0.3;
const REJECTION_CAP: usize = 100;
const COMPANION_QUEUE_CAP: usize = 64;

/// Stream id of the geometry draws; example draws use stream 0.
const GEOMETRY_STREAM: u64 = 1;

#[derive(Debug, Clone)]
struct Group {
    center: Vec<f64>,
    remaining: usize,
}

/// Generator for one scenario. Yields examples in arrival order.
#[derive(Debug, Clone)]
pub struct GeneratorState {
    spec: ScenarioSpec,
    cursor: u64,
    rng: RandomSource,
    /// Per sub-cluster (start, end) center.
    centers: Vec<(Vec<f64>, Vec<f64>)>,
    border_site: Option<Group>,
    rare_group: Option<Group>,
    companions: VecDeque<Vec<f64>>,
    frozen: Option<f64>,
}

impl GeneratorState {
    /// Panics if the spec is invalid; specs from [`parse_scenario`] always are.
    pub fn new(spec: ScenarioSpec) -> Self {
        spec.validate().expect("valid scenario spec");
        let mut geo = RandomSource::substream(spec.seed, GEOMETRY_STREAM);
        let centers = layout(&spec, &mut geo);
        GeneratorState {
            rng: RandomSource::new(spec.seed),
            spec,
            cursor: 0,
            centers,
            border_site: None,
            rare_group: None,
            companions: VecDeque::new(),
            frozen: None,
        }
    }

    /// A generator that stays at one drift progress (0 = pre-drift, 1 =
    /// post-drift) for its whole length.
    pub fn frozen_at(spec: ScenarioSpec, progress: f64) -> Self {
        let mut g = Self::new(spec);
        g.frozen = Some(progress.clamp(0.0, 1.0));
        g
    }

    pub fn spec(&self) -> &ScenarioSpec {
        &self.spec
    }

    pub fn cursor(&self) -> u64 {
        self.cursor
    }

    fn progress(&self) -> f64 {
        self.frozen.unwrap_or_else(|| self.spec.progress(self.cursor))
    }

    /// Sub-cluster centers at the current position.
    pub fn current_centers(&self) -> Vec<Vec<f64>> {
        let t = self.progress();
        self.centers
            .iter()
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + (y - x) * t).collect())
            .collect()
    }

    /// Sub-cluster centers once the drift has completed.
    pub fn final_centers(&self) -> Vec<Vec<f64>> {
        let mut seen: Vec<Vec<f64>> = Vec::new();
        for (_, end) in &self.centers {
            if !seen.iter().any(|c| squared_distance(c, end) < 1e-18) {
                seen.push(end.clone());
            }
        }
        seen
    }

    /// Next example, or `None` once `length` examples have been produced.
    pub fn next_example(&mut self) -> Option<Example> {
        if self.cursor >= self.spec.length {
            return None;
        }
        let params = self.spec.params_at(self.progress());
        let centers = self.current_centers();
        let label = if self.rng.uniform() < params.imbalance {
            ClassLabel::Minority
        } else {
            ClassLabel::Majority
        };
        let mut features = match label {
            ClassLabel::Majority => self.majority_point(&centers),
            ClassLabel::Minority => {
                let u = self.rng.uniform();
                let p = params.profile;
                if u < p.safe {
                    self.safe_point(&centers)
                } else if u < p.safe + p.borderline {
                    self.borderline_point(&centers)
                } else {
                    self.rare_point(&centers)
                }
            }
        };
        for v in &mut features {
            *v = v.clamp(0.0, 1.0);
        }
        let x = Example::new(features, label, self.cursor);
        self.cursor += 1;
        Some(x)
    }

    fn pick_center<'a>(&mut self, centers: &'a [Vec<f64>]) -> &'a [f64] {
        let i = self.rng.random_range(0..centers.len());
        &centers[i]
    }

    fn safe_point(&mut self, centers: &[Vec<f64>]) -> Vec<f64> {
        let c = self.pick_center(centers).to_vec();
        in_shell(&mut self.rng, &c, 0.0, SAFE_CORE * RADIUS)
    }

    fn borderline_point(&mut self, centers: &[Vec<f64>]) -> Vec<f64> {
        if self.border_site.as_ref().is_none_or(|g| g.remaining == 0) {
            let c = self.pick_center(centers).to_vec();
            let site = in_shell(&mut self.rng, &c, BORDER_SHELL.0 * RADIUS, BORDER_SHELL.1 * RADIUS);
            self.enqueue_companions(&site, BORDER_SITE_SIZE, BORDER_SPREAD);
            self.border_site = Some(Group {
                center: site,
                remaining: BORDER_SITE_SIZE,
            });
        }
        let site = self.border_site.as_mut().expect("open site");
        site.remaining -= 1;
        let center = site.center.clone();
        in_shell(&mut self.rng, &center, 0.0, BORDER_SPREAD)
    }

    fn rare_point(&mut self, centers: &[Vec<f64>]) -> Vec<f64> {
        if self.rare_group.as_ref().is_none_or(|g| g.remaining == 0) {
            let clearance = (RARE_CLEARANCE * RADIUS).powi(2);
            let margin = 2.0 * RARE_SPREAD;
            let mut p = Vec::new();
            for _ in 0..REJECTION_CAP {
                p = (0..self.spec.dimensions)
                    .map(|_| margin + (1.0 - 2.0 * margin) * self.rng.uniform())
                    .collect();
                if centers.iter().all(|c| squared_distance(c, &p) >= clearance) {
                    break;
                }
            }
            self.enqueue_companions(&p, RARE_COMPANIONS, RARE_SPREAD);
            self.rare_group = Some(Group {
                center: p,
                remaining: RARE_GROUP_SIZE,
            });
        }
        let group = self.rare_group.as_mut().expect("open group");
        group.remaining -= 1;
        let center = group.center.clone();
        in_shell(&mut self.rng, &center, 0.0, RARE_SPREAD)
    }

    fn enqueue_companions(&mut self, site: &[f64], n: usize, spread: f64) {
        for _ in 0..n {
            let companion = in_shell(&mut self.rng, site, 0.0, spread);
            if self.companions.len() == COMPANION_QUEUE_CAP {
                self.companions.pop_front();
            }
            self.companions.push_back(companion);
        }
    }

    fn majority_point(&mut self, centers: &[Vec<f64>]) -> Vec<f64> {
        if let Some(p) = self.companions.pop_front() {
            return p;
        }
        let core = RADIUS * RADIUS;
        let mut p = Vec::new();
        for _ in 0..REJECTION_CAP {
            p = (0..self.spec.dimensions).map(|_| self.rng.uniform()).collect();
            if centers.iter().all(|c| squared_distance(c, &p) >= core) {
                break;
            }
        }
        p
    }
}

impl Iterator for GeneratorState {
    type Item = Example;

    fn next(&mut self) -> Option<Example> {
        self.next_example()
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.spec.length - self.cursor) as usize;
        (left, Some(left))
    }
}

/// Uniform point in the radial band `[inner, outer]` around `center`.
fn in_shell(rng: &mut RandomSource, center: &[f64], inner: f64, outer: f64) -> Vec<f64> {
    let d = center.len();
    let mut dir: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-12);
    let df = d as f64;
    let lo = inner.powf(df);
    let hi = outer.powf(df);
    let r = (lo + rng.uniform() * (hi - lo)).powf(1.0 / df);
    for (v, c) in dir.iter_mut().zip(center) {
        *v = c + *v / norm * r;
    }
    dir
}

fn unit_vector(rng: &mut RandomSource, d: usize) -> Vec<f64> {
    let v: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-12);
    v.into_iter().map(|x| x / norm).collect()
}

/// `n` points spread over `[0.25, 0.75]^d` by Latin hypercube strata.
fn latin_hypercube(rng: &mut RandomSource, n: usize, d: usize) -> Vec<Vec<f64>> {
    let mut points = vec![vec![0.0; d]; n];
    for dim in 0..d {
        let mut strata: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = rng.random_range(0..=i);
            strata.swap(i, j);
        }
        for (p, s) in points.iter_mut().zip(strata) {
            p[dim] = 0.25 + 0.5 * (s as f64 + 0.5) / n as f64;
        }
    }
    points
}

fn layout(spec: &ScenarioSpec, rng: &mut RandomSource) -> Vec<(Vec<f64>, Vec<f64>)> {
    let d = spec.dimensions;
    match spec.motion {
        ClusterMotion::None => latin_hypercube(rng, spec.subclusters_start, d)
            .into_iter()
            .map(|c| (c.clone(), c))
            .collect(),
        ClusterMotion::Split => {
            let origin = latin_hypercube(rng, 1, d).remove(0);
            (0..spec.subclusters_end)
                .map(|_| {
                    let u = unit_vector(rng, d);
                    let end = origin.iter().zip(&u).map(|(o, v)| o + SPLIT_DISPLACEMENT * v).collect();
                    (origin.clone(), end)
                })
                .collect()
        }
        ClusterMotion::Merge => {
            let start = latin_hypercube(rng, spec.subclusters_start, d);
            let n = start.len() as f64;
            let centroid: Vec<f64> = (0..d).map(|j| start.iter().map(|c| c[j]).sum::<f64>() / n).collect();
            start.into_iter().map(|c| (c, centroid.clone())).collect()
        }
        ClusterMotion::Move => latin_hypercube(rng, spec.subclusters_start, d)
            .into_iter()
            .map(|c| {
                let u = unit_vector(rng, d);
                let end = c
                    .iter()
                    .zip(&u)
                    .map(|(x, v)| (x + MOVE_DISTANCE * v).clamp(0.2, 0.8))
                    .collect();
                (c, end)
            })
            .collect(),
    }
}

/// Writes examples as CSV with header `f1,...,fd,label,index`.
pub fn write_stream_csv<W, I>(mut out: W, dimensions: usize, examples: I) -> io::Result<()>
where
    W: Write,
    I: IntoIterator<Item = Example>,
{
    let header: Vec<String> = (1..=dimensions).map(|i| format!("f{i}")).collect();
    writeln!(out, "{},label,index", header.join(","))?;
    for x in examples {
        for v in &x.features {
            write!(out, "{v},")?;
        }
        writeln!(out, "{},{}", x.label, x.index)?;
    }
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(name: &str, length: u64, seed: u64) -> ScenarioSpec {
        parse_scenario(name).unwrap().with_length(length).with_seed(seed)
    }

    #[test]
    fn static_ratio_concentrates() {
        let n = 100_000;
        let min = GeneratorState::new(spec("StaticIm10", n, 1))
            .filter(|x| x.label == ClassLabel::Minority)
            .count();
        let frac = min as f64 / n as f64;
        assert!((frac - 0.10).abs() <= 0.005, "{frac}");
    }

    #[test]
    fn streams_replay_under_seed() {
        let a: Vec<Example> = GeneratorState::new(spec("Split5+Rare40", 3_000, 7)).collect();
        let b: Vec<Example> = GeneratorState::new(spec("Split5+Rare40", 3_000, 7)).collect();
        let c: Vec<Example> = GeneratorState::new(spec("Split5+Rare40", 3_000, 8)).collect();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn stream_ends_after_length() {
        let mut g = GeneratorState::new(spec("StaticIm10", 10, 1));
        assert_eq!(g.by_ref().count(), 10);
        assert_eq!(g.next_example(), None);
        assert_eq!(g.cursor(), 10);
    }

    #[test]
    fn indices_increase_by_one_and_features_stay_in_cube() {
        for (i, x) in GeneratorState::new(spec("Move3+Borderline60+Rare40", 20_000, 2)).enumerate() {
            assert_eq!(x.index, i as u64);
            assert_eq!(x.dims(), 5);
            assert!(x.features.iter().all(|v| (0.0..=1.0).contains(v)));
        }
    }

    #[test]
    fn split_ends_with_distinct_centers() {
        let g = GeneratorState::new(spec("Split5", 1_000, 3));
        assert_eq!(g.final_centers().len(), 5);
        let first = g.current_centers();
        assert!(first.windows(2).all(|w| squared_distance(&w[0], &w[1]) < 1e-18));
    }

    #[test]
    fn merge_ends_with_one_center() {
        let g = GeneratorState::new(spec("Merge5", 1_000, 3));
        assert_eq!(g.final_centers().len(), 1);
    }

    #[test]
    fn csv_dump_format() {
        let xs = vec![Example::new(vec![0.5, 0.25], ClassLabel::Minority, 0)];
        let mut buf = Vec::new();
        write_stream_csv(&mut buf, 2, xs).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "f1,f2,label,index\n0.5,0.25,min,0\n");
    }
}
