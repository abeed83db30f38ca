//! Suite implementations over the catalog.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tilde_core::field::{
    alt_current, asymmetry, canonical_divergence_check, contract_with_covector, difference_current, divergence_of,
    ee_maxwell_residual, ee_scalar_residual, ee_symmetry_residual, identity_ee_residual, lie_current,
    master_identity_residual, noether_current, scalar_lagrangian_residual, theta_antisymmetry_residual,
    theta_tail_symmetry_residual, tilde_lagrangian_residual,
};
use tilde_core::geometry::lie_derivative_partial;
use tilde_core::scenarios::{self, emt_point, verify_metric_claims, verify_on_shell, Catalog, Field, FieldEntry, MetricEntry, VectorField};
use tilde_core::variational::{variational_tm_check, GaussianPerturbation};
use tilde_core::{
    geometry_at, levi_civita, lift, tilde, tilde_product_rule_residual, MetricField, Point, Scalar, Shape, Tensor,
    TensorField, Theory, Variance,
};

use crate::checks;
use crate::config::{SuiteConfig, XiSelection};
use crate::report::{Accumulator, CheckRecord, CheckReport};
use crate::VerifyError;

/// Points used to verify a metric entry's structural claims.
pub const CLAIM_POINTS: usize = 64;
const PERTURBATION_WIDTH: f64 = 0.17;
const PERTURBATION_SCALE: f64 = 0.2;

pub fn run_suite(config: &SuiteConfig) -> Result<CheckReport, VerifyError> {
    config.validate()?;
    let cat = scenarios::catalog();
    let metric = cat.metric(&config.metric)?.clone();
    let mut run = Run {
        cfg: config,
        cat: &cat,
        metric: &metric,
        records: Vec::new(),
    };
    if config.suite != "tilde-algebra" {
        run.verify_claims()?;
    }
    match config.suite.as_str() {
        "tilde-algebra" => run.tilde_algebra()?,
        "lie-calculus" => run.lie_calculus()?,
        "commutator" => run.commutator()?,
        "kinematic-lagrangian" => run.kinematic()?,
        "emt-onshell" => run.emt_onshell()?,
        "variational" => run.variational()?,
        "gauge" => run.gauge()?,
        other => unreachable!("validated suite {other}"),
    }
    let records = run.records;
    Ok(CheckReport::new(config.clone(), records))
}

struct Run<'a> {
    cfg: &'a SuiteConfig,
    cat: &'a Catalog,
    metric: &'a MetricEntry,
    records: Vec<CheckRecord>,
}

fn max_abs<R: Scalar>(t: &Tensor<R>) -> f64 {
    t.max_abs_value()
}

fn diff<R: Scalar>(a: &Tensor<R>, b: &Tensor<R>) -> f64 {
    (a - b).max_abs_value()
}

impl Run<'_> {
    fn acc(&self, id: &str, scenario: impl Into<String>) -> Accumulator {
        let spec = checks::find(id).unwrap_or_else(|| panic!("unregistered check {id}"));
        debug_assert!(spec.suite == self.cfg.suite || spec.id == "eom-gate", "{id} outside {}", self.cfg.suite);
        Accumulator::new(spec, scenario)
    }

    fn push(&mut self, accs: impl IntoIterator<Item = Accumulator>) {
        for a in accs {
            self.records.push(a.finish(self.cfg));
        }
    }

    fn order(&self) -> usize {
        self.cfg.jet_order
    }

    fn points(&self) -> Result<Vec<Point>, VerifyError> {
        Ok(self.metric.sample_points(self.cfg.points, self.cfg.seed)?)
    }

    fn verify_claims(&self) -> Result<(), VerifyError> {
        let pts = self.metric.sample_points(CLAIM_POINTS, self.cfg.seed)?;
        verify_metric_claims(self.metric, &pts, self.order().max(2))?;
        Ok(())
    }

    /// Vector fields for checks that hold for arbitrary ξ.
    fn vectors(&self) -> Result<Vec<VectorField>, VerifyError> {
        match self.cfg.xi {
            XiSelection::Random(n) => Ok(self.metric.random_vectors(n, self.cfg.seed)),
            XiSelection::Killing => {
                let k: Vec<VectorField> = self.metric.killing_vectors().cloned().collect();
                if k.is_empty() {
                    return Err(VerifyError::Config(format!(
                        "--xi killing: metric `{}` has no Killing vectors",
                        self.metric.name
                    )));
                }
                Ok(k)
            }
        }
    }

    fn scenario(&self, field: &FieldEntry) -> String {
        format!("{}/{}", self.metric.name, field.name)
    }

    /// Field entries named in the config, or `default` filtered by theory.
    fn fields(&self, default: &[&str], need_on_shell: bool) -> Result<Vec<FieldEntry>, VerifyError> {
        let names: Vec<String> = if self.cfg.fields.is_empty() {
            default.iter().map(|s| s.to_string()).collect()
        } else {
            self.cfg.fields.clone()
        };
        let mut out = Vec::new();
        for name in &names {
            let f = self.cat.resolve_field(name, self.metric)?;
            if let Some(t) = &self.cfg.theory {
                if f.theory.name() != t {
                    if self.cfg.fields.is_empty() {
                        continue;
                    }
                    return Err(VerifyError::Config(format!(
                        "field `{name}` belongs to theory `{}`, not `{t}`",
                        f.theory.name()
                    )));
                }
            }
            if need_on_shell && !f.on_shell {
                return Err(VerifyError::Config(format!("field `{name}` is not an on-shell configuration")));
            }
            out.push(f);
        }
        if out.is_empty() {
            return Err(VerifyError::Config(format!(
                "no field selected for suite `{}` on metric `{}`",
                self.cfg.suite, self.metric.name
            )));
        }
        Ok(out)
    }

    /// On-shell catalog fields defined on the metric.
    fn on_shell_names(&self) -> Vec<&'static str> {
        self.cat
            .fields
            .iter()
            .filter(|f| f.on_shell && f.metrics.contains(&self.metric.name))
            .map(|f| f.name)
            .collect()
    }

    fn field_points(&self, f: &FieldEntry) -> Result<Vec<Point>, VerifyError> {
        Ok(f.sample_points(self.metric, self.cfg.points, self.cfg.seed)?)
    }

    /// EOM gate; a claimed on-shell field above the gate is a claim failure.
    fn gate(&mut self, f: &FieldEntry, pts: &[Point]) -> Result<(), VerifyError> {
        let worst = verify_on_shell(self.metric, f, pts, self.order())?;
        let mut a = self.acc("eom-gate", self.scenario(f));
        a.add_aggregate(worst, 0.0, pts.len());
        self.push([a]);
        Ok(())
    }

    fn tilde_algebra(&mut self) -> Result<(), VerifyError> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.cfg.seed);
        for n in 2..=4 {
            let sc = format!("n={n}");
            let ids = [
                "tilde-delta",
                "tilde-metric",
                "tilde-scalar",
                "tilde-levi-civita",
                "tilde-brute",
                "tilde-leibniz",
                "tilde-trace",
            ];
            let mut a: Vec<Accumulator> = ids.iter().map(|id| self.acc(id, sc.clone())).collect();
            let eps = levi_civita::<f64>(n);
            let eps_expected = Tensor::from_fn(eps.shape().with_slot(Variance::Up).with_slot(Variance::Down), |i| {
                if i[n] == i[n + 1] {
                    -eps[&i[..n]]
                } else {
                    0.0
                }
            });
            for _ in 0..self.cfg.points {
                a[0].add(max_abs(&tilde(&Tensor::<f64>::delta(n))), 1.0);
                let g = random_metric(n, &mut rng);
                a[1].add(diff(&tilde(&g), &metric_tilde(&g)), max_abs(&g));
                a[2].add(max_abs(&tilde(&Tensor::scalar(n, rng.gen_range(-2.0..2.0)))), 1.0);
                let w: f64 = rng.gen_range(0.5..2.0);
                let e = eps.scale(w);
                a[3].add(diff(&tilde(&e), &eps_expected.scale(w)), w);
                let t = random_tensor(random_shape(n, rng.gen_range(0..=3), &mut rng), &mut rng);
                a[4].add(diff(&tilde(&t), &tilde_brute(&t)), max_abs(&t));
                let s1 = random_tensor(random_shape(n, rng.gen_range(0..=2), &mut rng), &mut rng);
                let s2 = random_tensor(random_shape(n, rng.gen_range(0..=2), &mut rng), &mut rng);
                let lr = tilde_product_rule_residual(&s1, &s2)?;
                a[5].add(max_abs(&lr), max_abs(&s1) * max_abs(&s2));
                let r = t.rank();
                let trace = tilde(&t).contract(r, r + 1)?;
                let weight = t.shape().p() as f64 - t.shape().q() as f64;
                a[6].add(diff(&trace, &t.scale(weight)), max_abs(&t));
            }
            self.push(a);
        }
        // the catalog metric itself
        let mut a = self.acc("tilde-metric", self.metric.name);
        for p in self.points()? {
            let g: Tensor<f64> = self.metric.metric.components(&p.coords);
            a.add(diff(&tilde(&g), &metric_tilde(&g)), max_abs(&g));
        }
        self.push([a]);
        Ok(())
    }

    fn lie_calculus(&mut self) -> Result<(), VerifyError> {
        let sc = self.metric.name;
        let n = self.metric.dim();
        let xs = self.vectors()?;
        let seed = self.cfg.seed;
        let tensors: Vec<_> = [(1, 0), (0, 1), (1, 1), (0, 2)]
            .iter()
            .enumerate()
            .map(|(k, &(p, q))| self.metric.random_tensor(p, q, seed.wrapping_add(101 + k as u64)))
            .collect();
        let (mut pp, mut vol, mut ld) = (self.acc("lie-metric", sc), self.acc("lie-volume", sc), self.acc("lie-forms", sc));
        for p in self.points()? {
            let geo = geometry_at(&self.metric.metric, &p, self.order())?;
            let x = lift(&p.coords, self.order())?;
            let (mut r_pp, mut s_pp, mut r_vol, mut s_vol, mut r_ld, mut s_ld) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
            let mut fields: Vec<_> = tensors.iter().map(|t| t.eval(&x)).collect();
            fields.push(geo.metric.clone());
            for v in &xs {
                let xi = v.eval(&x);
                let lg = geo.killing_residual(&xi)?;
                let sg = geo.symmetrized_gradient(&xi)?;
                r_pp = r_pp.max(diff(&lg, &sg));
                s_pp = s_pp.max(max_abs(&lg));

                let sqrt_g = geo.volume.value();
                let div = sqrt_g * geo.vector_divergence(&xi)?.value();
                let mut density = 0.0;
                for a in 0..n {
                    density += geo.volume.mul_ref(&xi[[a]]).partial(a)?.value();
                }
                let half = 0.5 * sqrt_g * geo.inverse.tensordot(&lg, &[(0, 0), (1, 1)])?.as_scalar().value();
                r_vol = r_vol.max((density - div).abs()).max((half - div).abs());
                s_vol = s_vol.max(div.abs());

                for t in &fields {
                    let cov = geo.lie_derivative(t, &xi)?;
                    let par = lie_derivative_partial(t, &xi)?;
                    r_ld = r_ld.max(diff(&cov, &par));
                    s_ld = s_ld.max(max_abs(&cov));
                }
            }
            pp.add(r_pp, s_pp);
            vol.add(r_vol, s_vol);
            ld.add(r_ld, s_ld);
        }
        self.push([pp, vol, ld]);
        Ok(())
    }

    fn commutator(&mut self) -> Result<(), VerifyError> {
        let sc = self.metric.name;
        let xs = self.vectors()?;
        let killing: Vec<VectorField> = self.metric.killing_vectors().cloned().collect();
        let seed = self.cfg.seed;
        let ranks = [(0, 0), (1, 0), (0, 1), (1, 1)];
        let tensors: Vec<_> = ranks
            .iter()
            .enumerate()
            .map(|(k, &(p, q))| self.metric.random_tensor(p, q, seed.wrapping_add(201 + k as u64)))
            .collect();
        let ids = [
            "curvature-commutator",
            "tilde-derivative",
            "c-equals-cri",
            "c-symmetric",
            "lie-nabla-from-c",
            "lie-nabla-metric",
        ];
        let mut a: Vec<Accumulator> = ids.iter().map(|id| self.acc(id, sc)).collect();
        let mut kc = self.acc("killing-commute", sc);
        for p in self.points()? {
            let geo = geometry_at(&self.metric.metric, &p, self.order())?;
            let x = lift(&p.coords, self.order())?;
            let ts: Vec<_> = tensors.iter().map(|t| t.eval(&x)).collect();
            let mut r = [0.0f64; 6];
            let mut s = [0.0f64; 6];
            for t in &ts {
                r[0] = r[0].max(max_abs(&geo.curvature_commutator_residual(t)?));
                s[0] = s[0].max(max_abs(t));
                if t.rank() > 0 {
                    r[1] = r[1].max(max_abs(&geo.tilde_derivative_residual(t)?));
                    s[1] = s[1].max(max_abs(t));
                }
            }
            for v in &xs {
                let xi = v.eval(&x);
                let c = geo.c_tensor(&xi)?;
                let cri = geo.c_tensor_from_lie_metric(&xi)?;
                r[2] = r[2].max(diff(&c, &cri));
                s[2] = s[2].max(max_abs(&c));
                r[3] = r[3].max(diff(&c, &c.transpose(1, 2)?));
                s[3] = s[3].max(max_abs(&c));
                for t in &ts[1..] {
                    let direct = geo.lie_nabla_commutator(t, &xi)?;
                    let via_c = geo.lie_nabla_commutator_from_c(t, &c)?;
                    r[4] = r[4].max(diff(&direct, &via_c));
                    s[4] = s[4].max(max_abs(&direct));
                }
                let dg = geo.lie_nabla_commutator(&geo.metric, &xi)?;
                let expected = geo.covariant_derivative(&geo.symmetrized_gradient(&xi)?)?.scale(-1.0);
                r[5] = r[5].max(diff(&dg, &expected));
                s[5] = s[5].max(max_abs(&dg));
            }
            for (k, acc) in a.iter_mut().enumerate() {
                acc.add(r[k], s[k]);
            }
            if !killing.is_empty() {
                let mut w = 0.0f64;
                for v in &killing {
                    let xi = v.eval(&x);
                    w = w.max(max_abs(&geo.c_tensor(&xi)?));
                    for t in &ts[1..] {
                        w = w.max(max_abs(&geo.lie_nabla_commutator(t, &xi)?));
                    }
                }
                kc.add(w, 0.0);
            }
        }
        self.push(a);
        if !killing.is_empty() {
            self.push([kc]);
        }
        Ok(())
    }

    fn kinematic(&mut self) -> Result<(), VerifyError> {
        let xs = self.vectors()?;
        let fields = self.fields(&["random-scalar", "random-one-form"], false)?;
        for f in &fields {
            let sc = self.scenario(f);
            let ids = [
                "lagrangian-scalar",
                "theta-antisymmetry",
                "theta-tail-symmetry",
                "tm-symmetry",
                "tilde-lagrangian",
            ];
            let mut a: Vec<Accumulator> = ids.iter().map(|id| self.acc(id, sc.clone())).collect();
            for p in self.field_points(f)? {
                let (geo, fp, emt) = emt_point(self.metric, f, &p, self.order())?;
                let d = &emt.derivatives;
                let mut w = 0.0f64;
                for v in &xs {
                    let xi = v.eval(&fp.coords);
                    w = w.max(scalar_lagrangian_residual(&geo, &fp, d, &xi)?.value().abs());
                }
                a[0].add(w, emt.lagrangian().value());
                a[1].add(max_abs(&theta_antisymmetry_residual(&emt.theta)), max_abs(&emt.theta));
                a[2].add(max_abs(&theta_tail_symmetry_residual(&emt.q)), max_abs(&emt.q));
                a[3].add(max_abs(&asymmetry(&emt.metric)), max_abs(&emt.metric));
                a[4].add(max_abs(&tilde_lagrangian_residual(&geo, &fp, d)?), 2.0 * max_abs(&d.d_metric));
            }
            self.push(a);
        }
        // negative control
        let broken = self.cat.resolve_field("broken-scalar", self.metric)?;
        let mut a = self.acc("broken-lagrangian", self.scenario(&broken));
        for p in self.field_points(&broken)? {
            let (geo, fp, emt) = emt_point(self.metric, &broken, &p, self.order())?;
            let mut w = 0.0f64;
            for v in &xs {
                let xi = v.eval(&fp.coords);
                w = w.max(scalar_lagrangian_residual(&geo, &fp, &emt.derivatives, &xi)?.value().abs());
            }
            a.add(w, emt.lagrangian().value());
        }
        self.push([a]);
        Ok(())
    }

    fn emt_onshell(&mut self) -> Result<(), VerifyError> {
        let defaults = self.on_shell_names();
        let fields = self.fields(&defaults, true)?;
        let arbitrary = self.vectors()?;
        let killing: Vec<VectorField> = self.metric.killing_vectors().cloned().collect();
        let parallel: Vec<VectorField> = self.metric.vectors.iter().filter(|v| v.parallel).cloned().collect();
        let flat = self.metric.flat;
        for f in &fields {
            let pts = self.field_points(f)?;
            self.gate(f, &pts)?;
            let sc = self.scenario(f);
            let scalar_content = matches!(f.theory, Theory::Scalar { .. } | Theory::BrokenScalar);
            let acc = |id: &str| self.acc(id, sc.clone());
            let (mut tb, mut tm, mut eq, mut tc) = (acc("div-tb"), acc("div-tm"), acc("tb-equals-tm"), acc("div-tc-flat"));
            let (mut cd, mut cd_scalar) = (acc("canonical-divergence"), acc("canonical-divergence-scalar"));
            let mut cd_nonzero = acc("canonical-divergence-nonzero");
            let (mut noether, mut alt, mut lie) = (acc("noether-current"), acc("alt-current"), acc("lie-current"));
            let (mut dc, mut par) = (acc("difference-current"), acc("parallel-current"));
            let (mut ee, mut ee_sym) = (acc("identity-ee"), acc("ee-symmetry"));
            let mut ee_special = acc(if scalar_content { "ee-scalar" } else { "ee-maxwell" });
            let mut master = acc("master-identity");
            let (mut lhs_max, mut rhs_max) = (0.0f64, 0.0f64);
            for p in &pts {
                let (geo, fp, emt) = emt_point(self.metric, f, p, self.order())?;
                let d = &emt.derivatives;
                let x = &fp.coords;
                tb.add(max_abs(&geo.divergence(&emt.belinfante, 0)?), max_abs(&emt.belinfante));
                tm.add(max_abs(&geo.divergence(&emt.metric, 0)?), max_abs(&emt.metric));
                eq.add(diff(&emt.belinfante, &emt.metric), max_abs(&emt.metric));
                if flat {
                    tc.add(max_abs(&geo.divergence(&emt.canonical, 0)?), max_abs(&emt.canonical));
                }
                let (l, r) = canonical_divergence_check(&geo, &fp, &emt)?;
                let (ml, mr) = (max_abs(&l), max_abs(&r));
                cd.add(diff(&l, &r), ml.max(mr));
                cd_scalar.add(ml.max(mr), 0.0);
                lhs_max = lhs_max.max(ml);
                rhs_max = rhs_max.max(mr);

                let (mut wn, mut wa, mut wl, mut sn) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
                for v in &killing {
                    let xi = v.eval(x);
                    let j = noether_current(&geo, &emt, &xi)?;
                    sn = sn.max(max_abs(&j));
                    wn = wn.max(divergence_of(&geo, &j)?.value().abs());
                    wa = wa.max(divergence_of(&geo, &alt_current(&geo, &emt, &xi)?)?.value().abs());
                    wl = wl.max(divergence_of(&geo, &lie_current(&geo, &fp, &emt, &xi)?)?.value().abs());
                }
                if !killing.is_empty() {
                    noether.add(wn, sn);
                    alt.add(wa, sn);
                    lie.add(wl, sn);
                }
                let (mut wd, mut wm, mut sm) = (0.0f64, 0.0f64, 0.0f64);
                for v in arbitrary.iter().chain(&killing) {
                    let xi = v.eval(x);
                    wd = wd.max(divergence_of(&geo, &difference_current(&geo, &emt, &xi)?)?.value().abs());
                }
                for v in &arbitrary {
                    let xi = v.eval(x);
                    wm = wm.max(master_identity_residual(&geo, &emt, &xi)?.value().abs());
                    sm = sm.max(divergence_of(&geo, &noether_current(&geo, &emt, &xi)?)?.value().abs());
                }
                dc.add(wd, max_abs(&emt.theta));
                master.add(wm, sm);
                if !parallel.is_empty() {
                    let mut w = 0.0f64;
                    for v in &parallel {
                        let j = contract_with_covector(&geo, &emt.canonical, &v.eval(x))?;
                        w = w.max(divergence_of(&geo, &j)?.value().abs());
                    }
                    par.add(w, max_abs(&emt.canonical));
                }
                let two_dg = 2.0 * max_abs(&d.d_metric);
                ee.add(max_abs(&identity_ee_residual(&geo, &fp, &emt)?), two_dg);
                ee_sym.add(max_abs(&ee_symmetry_residual(&geo, &fp, &emt)?), two_dg);
                let special = if scalar_content {
                    ee_scalar_residual(&geo, &fp, d)?
                } else {
                    ee_maxwell_residual(&geo, &fp, d)?
                };
                ee_special.add(max_abs(&special), two_dg);
            }
            cd_nonzero.add_aggregate(lhs_max.min(rhs_max), lhs_max.max(rhs_max), pts.len());
            let mut out = vec![tb, tm, eq];
            if flat {
                out.push(tc);
            }
            out.push(cd);
            if scalar_content {
                out.push(cd_scalar);
            } else if !flat {
                out.push(cd_nonzero);
            }
            if !killing.is_empty() {
                out.extend([noether, alt, lie]);
            }
            out.push(dc);
            if !parallel.is_empty() {
                out.push(par);
            }
            out.extend([ee, ee_sym, ee_special, master]);
            self.push(out);
        }
        Ok(())
    }

    fn variational(&mut self) -> Result<(), VerifyError> {
        let defaults = self.on_shell_names();
        let fields = if self.cfg.fields.is_empty() {
            // one field is enough by default; the quadrature is the expensive part
            let mut all = self.fields(&defaults, false)?;
            all.truncate(1);
            all
        } else {
            self.fields(&[], false)?
        };
        let n = self.metric.dim();
        let grid = self.cfg.grid.unwrap_or(if n <= 2 { 64 } else { 8 });
        let h = perturbation(self.metric, self.cfg.seed);
        for f in &fields {
            let sc = self.scenario(f);
            let r = variational_tm_check(&f.theory, &self.metric.metric, &f.field, &h, &self.metric.domain.bounds, grid)
                .map_err(|e| match e {
                    tilde_core::variational::VariationalError::SupportTouchesBoundary { .. } => VerifyError::Config(e.to_string()),
                    other => VerifyError::Engine(other.to_string()),
                })?;
            let mut tm = self.acc("variational-tm", sc.clone());
            tm.add_aggregate(r.difference(), r.action_derivative.abs().max(r.emt_integral.abs()), r.cells);
            let mut pw = self.acc("variational-pointwise", sc);
            pw.add_aggregate(r.pointwise, r.action_derivative.abs(), r.cells);
            self.push([tm, pw]);
        }
        Ok(())
    }

    fn gauge(&mut self) -> Result<(), VerifyError> {
        if self.metric.dim() != 4 {
            return Err(VerifyError::Config(format!(
                "gauge suite needs a four-dimensional metric, `{}` has dimension {}",
                self.metric.name,
                self.metric.dim()
            )));
        }
        if self.cfg.theory.as_deref().is_some_and(|t| t != "maxwell") {
            return Err(VerifyError::Config("gauge suite only applies to the maxwell theory".into()));
        }
        let defaults: Vec<&str> = self
            .on_shell_names()
            .into_iter()
            .filter(|name| self.cat.field(name).is_ok_and(|f| f.theory == Theory::Maxwell && !matches!(f.field, Field::GaugeShifted(_))))
            .collect();
        let fields = self.fields(&defaults, true)?;
        for f in &fields {
            if f.theory != Theory::Maxwell {
                return Err(VerifyError::Config(format!("field `{}` is not a maxwell configuration", f.name)));
            }
            let shifted = FieldEntry {
                field: Field::GaugeShifted(Box::new(f.field.clone())),
                ..f.clone()
            };
            let pts = self.field_points(f)?;
            self.gate(f, &pts)?;
            let sc = self.scenario(f);
            let (mut tm, mut tb, mut tc) = (self.acc("gauge-tm", sc.clone()), self.acc("gauge-tb", sc.clone()), self.acc("gauge-tc-control", sc));
            for p in &pts {
                let (_, _, a) = emt_point(self.metric, f, p, self.order())?;
                let (_, _, b) = emt_point(self.metric, &shifted, p, self.order())?;
                tm.add(diff(&a.metric, &b.metric), max_abs(&a.metric));
                tb.add(diff(&a.belinfante, &b.belinfante), max_abs(&a.belinfante));
                tc.add(diff(&a.canonical, &b.canonical), max_abs(&a.canonical));
            }
            self.push([tm, tb, tc]);
        }
        Ok(())
    }
}

/// Seeded Gaussian bump well inside the metric's sampling box.
pub fn perturbation(metric: &MetricEntry, seed: u64) -> GaussianPerturbation {
    let bounds = &metric.domain.bounds;
    let half = bounds.iter().map(|(lo, hi)| 0.5 * (hi - lo)).fold(f64::INFINITY, f64::min);
    let center = bounds
        .iter()
        .enumerate()
        .map(|(i, (lo, hi))| 0.5 * (lo + hi) + if i % 2 == 0 { 0.05 } else { -0.1 } * half)
        .collect();
    GaussianPerturbation::seeded(center, PERTURBATION_WIDTH * half, PERTURBATION_SCALE, seed)
}

fn random_tensor(shape: Shape, rng: &mut ChaCha8Rng) -> Tensor<f64> {
    let data = (0..shape.len()).map(|_| rng.gen_range(-2.0..2.0)).collect();
    Tensor::from_vec(shape, data).expect("shape and data agree")
}

fn random_shape(dim: usize, rank: usize, rng: &mut ChaCha8Rng) -> Shape {
    let slots = (0..rank)
        .map(|_| if rng.gen_bool(0.5) { Variance::Up } else { Variance::Down })
        .collect();
    Shape::new(dim, slots).expect("valid shape")
}

/// Symmetric and diagonally dominant; Lorentzian about half the time.
fn random_metric(dim: usize, rng: &mut ChaCha8Rng) -> Tensor<f64> {
    let lorentzian = rng.gen_bool(0.5);
    let mut g = Tensor::<f64>::zeros(Shape::pq(dim, 0, 2));
    for a in 0..dim {
        for b in a..dim {
            let v = if a == b {
                let d = 2.0 + rng.gen::<f64>();
                if lorentzian && a == 0 {
                    -d
                } else {
                    d
                }
            } else {
                0.3 * rng.gen_range(-1.0..1.0)
            };
            g[[a, b]] = v;
            g[[b, a]] = v;
        }
    }
    g
}

/// `g̃_{ab}{}^c_d = −g_{db}δ^c_a − g_{ad}δ^c_b`
fn metric_tilde(g: &Tensor<f64>) -> Tensor<f64> {
    let shape = g.shape().with_slot(Variance::Up).with_slot(Variance::Down);
    Tensor::from_fn(shape, |i| {
        let (a, b, c, d) = (i[0], i[1], i[2], i[3]);
        let mut v = 0.0;
        if c == a {
            v -= g[[d, b]];
        }
        if c == b {
            v -= g[[a, d]];
        }
        v
    })
}

/// Sum of single-index replacements written out directly.
fn tilde_brute(t: &Tensor<f64>) -> Tensor<f64> {
    let r = t.rank();
    let shape = t.shape().with_slot(Variance::Up).with_slot(Variance::Down);
    Tensor::from_fn(shape, |idx| {
        let (a, b) = (idx[r], idx[r + 1]);
        let base = &idx[..r];
        let mut sum = 0.0;
        for (i, v) in t.slots().iter().enumerate() {
            let mut j = base.to_vec();
            match v {
                Variance::Up if base[i] == b => {
                    j[i] = a;
                    sum += t[&j[..]];
                }
                Variance::Down if base[i] == a => {
                    j[i] = b;
                    sum -= t[&j[..]];
                }
                _ => {}
            }
        }
        sum
    })
}
