use std::collections::HashSet;

use super::centroid::{aggregate_sums, Grid};
use super::membership::{build_partition, TriangularMF, Universe};
use super::rule::{Connective, Rule};
use crate::error::{Error, Result};

/// Resolution of the output grid the centroid is taken over.
pub const DEFAULT_GRID_POINTS: usize = 1001;

/// A covariate's linguistic partition, e.g. `loc_risk ∈ {LO, MED, HI}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferentialSet {
    pub name: String,
    pub labels: Vec<String>,
    pub universe: Universe,
}

impl ReferentialSet {
    pub fn new(name: impl Into<String>, labels: &[&str], universe: Universe) -> Result<Self> {
        let set = Self {
            name: name.into(),
            labels: labels.iter().map(|s| s.to_string()).collect(),
            universe,
        };
        set.validate()?;
        Ok(set)
    }

    fn validate(&self) -> Result<()> {
        if self.labels.len() < 2 {
            return Err(Error::Specification(format!(
                "set `{}` needs at least 2 labels",
                self.name
            )));
        }
        let mut seen = HashSet::new();
        for l in &self.labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::Specification(format!(
                    "set `{}` repeats label `{l}`",
                    self.name
                )));
            }
        }
        Ok(())
    }

    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

/// One entry of the parameter layout: the peak of `label` in `set`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamSlot {
    pub set: String,
    pub label: String,
}

#[derive(Debug, Clone)]
struct CompiledRule {
    antecedents: Vec<(usize, usize)>,
    connectives: Vec<Connective>,
    consequent: usize,
    included: bool,
}

impl CompiledRule {
    #[inline]
    fn strength(&self, degrees: &[Vec<f64>]) -> f64 {
        if !self.included {
            return 0.0;
        }
        let (s, l) = self.antecedents[0];
        let mut acc = degrees[s][l];
        for (conn, &(s, l)) in self.connectives.iter().zip(&self.antecedents[1..]) {
            acc = conn.apply(acc, degrees[s][l]);
        }
        acc
    }
}

/// A Mamdani rule base: input partitions, an output partition and rules.
///
/// The parameter vector holds one peak per label. Input sets that appear in
/// at least one rule contribute their labels in declaration order, followed
/// by the output labels. Sets no rule mentions carry no parameters.
#[derive(Debug, Clone)]
pub struct RuleBase {
    inputs: Vec<ReferentialSet>,
    output: ReferentialSet,
    rules: Vec<Rule>,
    compiled: Vec<CompiledRule>,
    /// Offset of each input set's peaks in θ, `None` for unused sets.
    input_offsets: Vec<Option<usize>>,
    output_offset: usize,
    layout: Vec<ParamSlot>,
    grid: Grid,
}

impl RuleBase {
    pub fn new(
        inputs: Vec<ReferentialSet>,
        output: ReferentialSet,
        rules: Vec<Rule>,
    ) -> Result<Self> {
        Self::with_grid(inputs, output, rules, DEFAULT_GRID_POINTS)
    }

    pub fn with_grid(
        inputs: Vec<ReferentialSet>,
        output: ReferentialSet,
        rules: Vec<Rule>,
        grid_points: usize,
    ) -> Result<Self> {
        if grid_points < 2 {
            return Err(Error::Specification(
                "output grid needs at least 2 points".into(),
            ));
        }
        output.validate()?;
        let mut names = HashSet::new();
        for set in &inputs {
            set.validate()?;
            if !names.insert(set.name.as_str()) {
                return Err(Error::Specification(format!(
                    "duplicate input set `{}`",
                    set.name
                )));
            }
        }
        if names.contains(output.name.as_str()) {
            return Err(Error::Specification(format!(
                "output set `{}` shadows an input set",
                output.name
            )));
        }
        if rules.is_empty() {
            return Err(Error::Specification("rule base has no rules".into()));
        }

        let mut used = vec![false; inputs.len()];
        let mut compiled = Vec::with_capacity(rules.len());
        for rule in &rules {
            let mut antecedents = Vec::with_capacity(rule.antecedents.len());
            for clause in &rule.antecedents {
                let s = inputs
                    .iter()
                    .position(|set| set.name == clause.set)
                    .ok_or_else(|| {
                        Error::Specification(format!(
                            "rule `{rule}` names unknown input set `{}`",
                            clause.set
                        ))
                    })?;
                let l = inputs[s].label_index(&clause.label).ok_or_else(|| {
                    Error::Specification(format!(
                        "set `{}` has no label `{}`",
                        clause.set, clause.label
                    ))
                })?;
                used[s] = true;
                antecedents.push((s, l));
            }
            if rule.consequent.set != output.name {
                return Err(Error::Specification(format!(
                    "rule `{rule}` concludes on `{}`, expected output `{}`",
                    rule.consequent.set, output.name
                )));
            }
            let consequent = output.label_index(&rule.consequent.label).ok_or_else(|| {
                Error::Specification(format!(
                    "output `{}` has no label `{}`",
                    output.name, rule.consequent.label
                ))
            })?;
            compiled.push(CompiledRule {
                antecedents,
                connectives: rule.connectives.clone(),
                consequent,
                included: rule.included,
            });
        }

        let mut layout = Vec::new();
        let mut input_offsets = Vec::with_capacity(inputs.len());
        for (set, &is_used) in inputs.iter().zip(&used) {
            if is_used {
                input_offsets.push(Some(layout.len()));
                layout.extend(set.labels.iter().map(|l| ParamSlot {
                    set: set.name.clone(),
                    label: l.clone(),
                }));
            } else {
                input_offsets.push(None);
            }
        }
        let output_offset = layout.len();
        layout.extend(output.labels.iter().map(|l| ParamSlot {
            set: output.name.clone(),
            label: l.clone(),
        }));

        let grid = Grid {
            lower: output.universe.lower(),
            upper: output.universe.upper(),
            points: grid_points,
        };

        Ok(Self {
            inputs,
            output,
            rules,
            compiled,
            input_offsets,
            output_offset,
            layout,
            grid,
        })
    }

    pub fn inputs(&self) -> &[ReferentialSet] {
        &self.inputs
    }

    pub fn output(&self) -> &ReferentialSet {
        &self.output
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn layout(&self) -> &[ParamSlot] {
        &self.layout
    }

    pub fn param_count(&self) -> usize {
        self.layout.len()
    }

    /// Universe each parameter's peak must lie in, in layout order.
    pub fn param_universes(&self) -> Vec<Universe> {
        let mut out = Vec::with_capacity(self.layout.len());
        for (set, off) in self.inputs.iter().zip(&self.input_offsets) {
            if off.is_some() {
                out.extend(std::iter::repeat_n(set.universe, set.labels.len()));
            }
        }
        out.extend(std::iter::repeat_n(
            self.output.universe,
            self.output.labels.len(),
        ));
        out
    }

    /// Copy of this rule base without rule `index`.
    pub fn without_rule(&self, index: usize) -> Result<Self> {
        let mut rules = self.rules.clone();
        if index >= rules.len() {
            return Err(Error::Specification(format!("no rule {index}")));
        }
        rules.remove(index);
        Self::with_grid(
            self.inputs.clone(),
            self.output.clone(),
            rules,
            self.grid.points,
        )
    }

    /// Fixes θ, building every membership function once.
    pub fn evaluator(&self, theta: &[f64]) -> Result<Evaluator<'_>> {
        if theta.len() != self.param_count() {
            return Err(Error::Specification(format!(
                "rule base expects {} parameters, got {}",
                self.param_count(),
                theta.len()
            )));
        }
        let partitions = self
            .inputs
            .iter()
            .zip(&self.input_offsets)
            .map(|(set, off)| match off {
                Some(o) => build_partition(&set.universe, &theta[*o..*o + set.labels.len()]),
                None => Ok(Vec::new()),
            })
            .collect::<Result<Vec<_>>>()?;
        let n_out = self.output.labels.len();
        let out_mfs = build_partition(
            &self.output.universe,
            &theta[self.output_offset..self.output_offset + n_out],
        )?;
        Ok(Evaluator {
            rb: self,
            partitions,
            out_mfs,
        })
    }

    /// Crisp output for one covariate vector (ordered like [`Self::inputs`]).
    pub fn infer(&self, theta: &[f64], x: &[f64]) -> Result<f64> {
        self.evaluator(theta)?.infer(x)
    }
}

/// Free-function form of [`RuleBase::infer`].
pub fn infer(rb: &RuleBase, theta: &[f64], x: &[f64]) -> Result<f64> {
    rb.infer(theta, x)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inference {
    pub output: f64,
    /// False when no rule fired and the universe midpoint was returned.
    pub fired: bool,
}

/// A rule base with θ bound; cheap to apply to many covariate rows.
#[derive(Debug, Clone)]
pub struct Evaluator<'a> {
    rb: &'a RuleBase,
    partitions: Vec<Vec<TriangularMF>>,
    out_mfs: Vec<TriangularMF>,
}

impl Evaluator<'_> {
    pub fn output_mfs(&self) -> &[TriangularMF] {
        &self.out_mfs
    }

    pub fn input_mfs(&self, set: usize) -> &[TriangularMF] {
        &self.partitions[set]
    }

    /// Firing strength of every rule at `x`.
    pub fn rule_strengths(&self, x: &[f64]) -> Result<Vec<f64>> {
        let degrees = self.degrees(x)?;
        Ok(self
            .rb
            .compiled
            .iter()
            .map(|r| r.strength(&degrees))
            .collect())
    }

    fn degrees(&self, x: &[f64]) -> Result<Vec<Vec<f64>>> {
        if x.len() != self.rb.inputs.len() {
            return Err(Error::Specification(format!(
                "rule base expects {} covariates, got {}",
                self.rb.inputs.len(),
                x.len()
            )));
        }
        Ok(self
            .rb
            .inputs
            .iter()
            .zip(&self.partitions)
            .zip(x)
            .map(|((set, mfs), &u)| {
                let u = set.universe.clamp(u);
                mfs.iter().map(|mf| mf.degree(u)).collect()
            })
            .collect())
    }

    pub fn infer(&self, x: &[f64]) -> Result<f64> {
        Ok(self.infer_detailed(x)?.output)
    }

    /// Singleton fuzzification, min implication, max aggregation and a
    /// grid centroid.
    pub fn infer_detailed(&self, x: &[f64]) -> Result<Inference> {
        let degrees = self.degrees(x)?;
        // Clipping one consequent by several rules and taking the max equals
        // clipping it once by the strongest of those rules.
        let mut label_strength = vec![0.0f64; self.out_mfs.len()];
        for rule in &self.rb.compiled {
            let w = rule.strength(&degrees);
            let slot = &mut label_strength[rule.consequent];
            *slot = slot.max(w);
        }
        let active: Vec<(f64, TriangularMF)> = label_strength
            .iter()
            .zip(&self.out_mfs)
            .filter(|(w, _)| **w > 0.0)
            .map(|(w, mf)| (*w, *mf))
            .collect();
        let (den, num) = if active.is_empty() {
            (0.0, 0.0)
        } else {
            aggregate_sums(&active, &self.rb.grid)
        };
        if den > 0.0 {
            let out = self.rb.output.universe.clamp(num / den);
            Ok(Inference {
                output: out,
                fired: true,
            })
        } else {
            Ok(Inference {
                output: self.rb.output.universe.midpoint(),
                fired: false,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fuzzy::rule::Clause;

    fn u(lo: f64, hi: f64) -> Universe {
        Universe::new(lo, hi).unwrap()
    }

    fn downtime_rb() -> RuleBase {
        let loc = ReferentialSet::new("loc_risk", &["LO", "MED", "HI"], u(0.0, 10.0)).unwrap();
        let mnt =
            ReferentialSet::new("maintenance", &["POOR", "AVG", "GOOD"], u(0.0, 10.0)).unwrap();
        let out = ReferentialSet::new("downtime", &["LO", "MED", "HI"], u(0.0, 100.0)).unwrap();
        let rules = [
            "IF loc_risk IS HI OR maintenance IS POOR THEN downtime IS HI",
            "IF loc_risk IS MED OR maintenance IS AVG THEN downtime IS MED",
            "IF loc_risk IS LO AND maintenance IS GOOD THEN downtime IS LO",
        ]
        .iter()
        .map(|r| r.parse().unwrap())
        .collect();
        RuleBase::new(vec![loc, mnt], out, rules).unwrap()
    }

    const THETA_TRUE: [f64; 9] = [5.0, 5.0, 5.0, 5.0, 5.0, 5.0, 50.0, 50.0, 50.0];

    /// Centroid of a triangle sampled on the same 1001-point grid.
    fn grid_centroid(a: f64, b: f64, c: f64) -> f64 {
        let mf = TriangularMF::new(a, b, c).unwrap();
        let (mut n, mut d) = (0.0, 0.0);
        for k in 0..=1000 {
            let z = k as f64 * 0.1;
            let m = mf.degree(z);
            n += z * m;
            d += m;
        }
        n / d
    }

    #[test]
    fn layout_follows_declaration_order() {
        let rb = downtime_rb();
        assert_eq!(rb.param_count(), 9);
        let names: Vec<_> = rb
            .layout()
            .iter()
            .map(|p| format!("{}.{}", p.set, p.label))
            .collect();
        assert_eq!(names[0], "loc_risk.LO");
        assert_eq!(names[3], "maintenance.POOR");
        assert_eq!(names[8], "downtime.HI");
    }

    #[test]
    fn single_rule_outputs() {
        let rb = downtime_rb();
        let ev = rb.evaluator(&THETA_TRUE).unwrap();

        let hi = ev.infer(&[10.0, 0.0]).unwrap();
        assert_eq!(
            ev.rule_strengths(&[10.0, 0.0]).unwrap(),
            vec![1.0, 0.0, 0.0]
        );
        assert!((hi - grid_centroid(50.0, 100.0, 100.0)).abs() < 1e-9);
        assert!((hi - 83.33).abs() < 0.05, "{hi}");

        assert!((ev.infer(&[5.0, 5.0]).unwrap() - 50.0).abs() < 1e-9);

        let lo = ev.infer(&[0.0, 10.0]).unwrap();
        assert_eq!(
            ev.rule_strengths(&[0.0, 10.0]).unwrap(),
            vec![0.0, 0.0, 1.0]
        );
        assert!((lo - grid_centroid(0.0, 0.0, 50.0)).abs() < 1e-9);
        assert!((lo - 16.67).abs() < 0.05, "{lo}");
    }

    #[test]
    fn out_of_universe_inputs_are_clamped() {
        let rb = downtime_rb();
        let a = rb.infer(&THETA_TRUE, &[12.0, -3.0]).unwrap();
        let b = rb.infer(&THETA_TRUE, &[10.0, 0.0]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn empty_aggregate_returns_midpoint() {
        let loc = ReferentialSet::new("a", &["LO", "HI"], u(0.0, 10.0)).unwrap();
        let out = ReferentialSet::new("o", &["LO", "HI"], u(0.0, 100.0)).unwrap();
        let rule = Rule::new(vec![Clause::new("a", "HI")], vec![], Clause::new("o", "HI")).unwrap();
        let rb = RuleBase::new(vec![loc], out, vec![rule]).unwrap();
        // HI = (9, 10, 10): x = 2 has zero membership
        let inf = rb
            .evaluator(&[1.0, 9.0, 10.0, 90.0])
            .unwrap()
            .infer_detailed(&[2.0])
            .unwrap();
        assert_eq!(
            inf,
            Inference {
                output: 50.0,
                fired: false
            }
        );
    }

    #[test]
    fn theta_length_mismatch() {
        let rb = downtime_rb();
        assert!(matches!(
            rb.infer(&[5.0; 8], &[1.0, 1.0]),
            Err(Error::Specification(_))
        ));
        assert!(matches!(
            rb.infer(&THETA_TRUE, &[1.0]),
            Err(Error::Specification(_))
        ));
    }

    #[test]
    fn unused_sets_carry_no_parameters() {
        let mut rb = downtime_rb();
        let dummy = ReferentialSet::new("dummy", &["POOR", "AVG", "GOOD"], u(0.0, 10.0)).unwrap();
        let mut inputs = rb.inputs().to_vec();
        inputs.push(dummy);
        rb = RuleBase::new(inputs, rb.output().clone(), rb.rules().to_vec()).unwrap();
        assert_eq!(rb.param_count(), 9);
        assert!((rb.infer(&THETA_TRUE, &[5.0, 5.0, 3.0]).unwrap() - 50.0).abs() < 1e-9);
    }

    #[test]
    fn validation_errors() {
        let a = ReferentialSet::new("a", &["LO", "HI"], u(0.0, 1.0)).unwrap();
        let o = ReferentialSet::new("o", &["LO", "HI"], u(0.0, 1.0)).unwrap();
        let bad_label: Rule = "IF a IS MED THEN o IS LO".parse().unwrap();
        assert!(RuleBase::new(vec![a.clone()], o.clone(), vec![bad_label]).is_err());
        let bad_set: Rule = "IF b IS LO THEN o IS LO".parse().unwrap();
        assert!(RuleBase::new(vec![a.clone()], o.clone(), vec![bad_set]).is_err());
        let bad_out: Rule = "IF a IS LO THEN a IS LO".parse().unwrap();
        assert!(RuleBase::new(vec![a.clone()], o.clone(), vec![bad_out]).is_err());
        assert!(RuleBase::new(vec![a.clone()], o.clone(), vec![]).is_err());
        assert!(ReferentialSet::new("x", &["A", "A"], u(0.0, 1.0)).is_err());
        assert!(ReferentialSet::new("x", &["A"], u(0.0, 1.0)).is_err());
    }
}
