use std::collections::BTreeMap;
use std::f64::consts::PI;

use rayon::prelude::*;

use super::output::ResultTable;
use super::{ExperimentConfig, ExperimentKind, ExperimentParams};
use crate::asymptotics::{
    approx_broadcast_center, gumbel_cdf, gumbel_sample, logistic_sample, sample_v,
    slowdown_factor, VSamplerConfig,
};
use crate::demographics::{sample_population, Demographics};
use crate::engine::{
    broadcast_summary, normalized_interval, passage_times, simulate_naive, simulate_schedule,
    simulate_thinned_yule, yule_reference_times, TransmissionSchedule,
};
use crate::rng::{SimRng, StreamFactory, StreamRole};
use crate::stats::{
    correlation, curve_grid, ks_one_sample, ks_two_sample, logistic_curve_check, mean, median,
    variance, Ecdf,
};

type Metrics = BTreeMap<String, f64>;

struct Ctx<'a> {
    demo: &'a Demographics,
    lambda: f64,
    params: &'a ExperimentParams,
    replicates: u64,
    streams: StreamFactory,
}

impl Ctx<'_> {
    fn per_replicate<T: Send, F: Fn(u64) -> T + Sync + Send>(&self, f: F) -> Vec<T> {
        (0..self.replicates).into_par_iter().map(f).collect()
    }

    fn schedule(&self, i: u64) -> TransmissionSchedule {
        let pop = sample_population(self.demo, &mut self.streams.stream(i, StreamRole::Population));
        simulate_schedule(self.demo, &pop, &mut self.streams.stream(i, StreamRole::Schedule))
    }

    fn v_config(&self) -> VSamplerConfig {
        VSamplerConfig::new(self.demo.z0, self.demo.rates, self.params.truncation)
            .expect("validated config")
    }

    /// Reference draws `(V, G, L)` sharing one `V` per draw.
    fn reference(&self) -> Vec<(f64, f64, f64)> {
        let cfg = self.v_config();
        (0..self.params.reference_samples as u64)
            .into_par_iter()
            .map(|j| {
                let mut rng: SimRng = self.streams.stream(j, StreamRole::Reference);
                let v = sample_v(&cfg, &mut rng);
                (v, gumbel_sample(&mut rng), logistic_sample(&mut rng))
            })
            .collect()
    }

    fn log_pn(&self) -> f64 {
        (self.demo.p * self.demo.n as f64).ln()
    }
}

fn ecdf(xs: Vec<f64>) -> Ecdf {
    Ecdf::new(xs).expect("at least one finite value")
}

fn put_moments(m: &mut Metrics, name: &str, xs: &[f64]) {
    m.insert(format!("mean_{name}"), mean(xs));
    if xs.len() > 1 {
        m.insert(format!("var_{name}"), variance(xs));
    }
}

pub(super) fn run_one(cfg: &ExperimentConfig, demo: &Demographics) -> (ResultTable, Metrics) {
    let ctx = Ctx {
        demo,
        lambda: demo.lambda(),
        params: &cfg.params,
        replicates: cfg.replicates as u64,
        streams: StreamFactory::new(cfg.master_seed),
    };
    match cfg.experiment {
        ExperimentKind::Broadcast => broadcast(&ctx),
        ExperimentKind::Passage => passage(&ctx),
        ExperimentKind::Curve => curve(&ctx),
        ExperimentKind::Slowdown => slowdown(&ctx),
        ExperimentKind::Oracle => oracle(&ctx),
        ExperimentKind::Yule => yule(&ctx),
        ExperimentKind::Limits => limits(&ctx),
    }
}

fn broadcast(ctx: &Ctx) -> (ResultTable, Metrics) {
    let n = ctx.demo.n;
    let (lp, log_pn, log_n) = (ctx.lambda * ctx.demo.p, ctx.log_pn(), (n as f64).ln());
    let beta = ctx.params.beta;
    let b = ((n as f64).powf(beta) as usize).clamp(1, n);
    let half = n / 2;
    let rows = ctx.per_replicate(|i| {
        let sched = ctx.schedule(i);
        let s = broadcast_summary(&sched);
        let middle = if b < half {
            normalized_interval(&sched, b, half, ctx.lambda, ctx.demo.p).ok()
        } else {
            None
        };
        let last = normalized_interval(&sched, n - b, n, ctx.lambda, ctx.demo.p).ok();
        let row = vec![
            s.t_half,
            s.t_half2,
            s.t_full,
            lp * s.t_half - log_pn,
            lp * s.t_half2 - log_n,
            lp * s.t_full - log_pn - log_n,
        ];
        (row, middle, last)
    });
    let mut table = ResultTable::new(&[
        "t_half", "t_half2", "t_full", "norm_half", "norm_half2", "norm_full",
    ]);
    let mut middles = Vec::new();
    let mut lasts = Vec::new();
    for (i, (row, middle, last)) in rows.into_iter().enumerate() {
        table.push(i as u64, row);
        middles.extend(middle);
        lasts.extend(last);
    }

    let mut m = Metrics::new();
    for c in ["t_half", "t_half2", "t_full", "norm_half", "norm_half2", "norm_full"] {
        put_moments(&mut m, c, &table.column(c).unwrap());
    }
    let nh = table.column("norm_half").unwrap();
    let nh2 = table.column("norm_half2").unwrap();
    let nf = table.column("norm_full").unwrap();
    if nh.len() > 1 {
        m.insert("corr_half_half2".into(), correlation(&nh, &nh2));
    }
    let reference = ctx.reference();
    let v: Vec<f64> = reference.iter().map(|r| r.0).collect();
    let vg: Vec<f64> = reference.iter().map(|r| r.0 + r.1).collect();
    put_moments(&mut m, "ref_v_plus_g", &vg);
    m.insert("ks_norm_full_vs_v_plus_g".into(), ks_two_sample(&ecdf(nf), &ecdf(vg)));
    m.insert("ks_norm_half_vs_v".into(), ks_two_sample(&ecdf(nh), &ecdf(v)));
    m.insert("ks_norm_half2_vs_gumbel".into(), ks_one_sample(&ecdf(nh2), gumbel_cdf));
    if !middles.is_empty() {
        m.insert(
            "mean_middle_phase_minus_expected".into(),
            mean(&middles) - (1.0 - beta) * log_n,
        );
    }
    let finals: Vec<f64> = lasts.iter().map(|x| x - (b as f64).ln()).collect();
    m.insert("ks_final_phase_vs_gumbel".into(), ks_one_sample(&ecdf(finals), gumbel_cdf));
    (table, m)
}

fn passage(ctx: &Ctx) -> (ResultTable, Metrics) {
    let k = ctx.params.k_targets;
    let (lp, log_pn) = (ctx.lambda * ctx.demo.p, ctx.log_pn());
    let mut columns = Vec::new();
    for prefix in ["tau", "norm", "rank"] {
        columns.extend((1..=k).map(|j| format!("{prefix}_{j}")));
    }
    let rows = ctx.per_replicate(|i| {
        let sched = ctx.schedule(i);
        let pt = passage_times(&sched, k, &mut ctx.streams.stream(i, StreamRole::Ranks))
            .expect("k_targets validated");
        let mut row = pt.taus.clone();
        row.extend(pt.taus.iter().map(|t| lp * t - log_pn));
        row.extend(pt.ranks.iter().map(|&r| r as f64));
        row
    });
    let mut table = ResultTable::new(&columns);
    for (i, row) in rows.into_iter().enumerate() {
        table.push(i as u64, row);
    }

    let mut m = Metrics::new();
    let norm1 = table.column("norm_1").unwrap();
    put_moments(&mut m, "tau_1", &table.column("tau_1").unwrap());
    put_moments(&mut m, "norm_1", &norm1);
    let reference = ctx.reference();
    let v: Vec<f64> = reference.iter().map(|r| r.0).collect();
    let vl: Vec<f64> = reference.iter().map(|r| r.0 + r.2).collect();
    put_moments(&mut m, "ref_v_plus_l", &vl);
    m.insert("ks_norm_1_vs_v_plus_l".into(), ks_two_sample(&ecdf(norm1.clone()), &ecdf(vl)));
    if k >= 2 && norm1.len() > 1 {
        let norm2 = table.column("norm_2").unwrap();
        m.insert("corr_norm_1_norm_2".into(), correlation(&norm1, &norm2));
        if v.len() > 1 {
            let var_v = variance(&v);
            m.insert("predicted_corr".into(), var_v / (var_v + PI * PI / 3.0));
        }
    }
    (table, m)
}

fn curve(ctx: &Ctx) -> (ResultTable, Metrics) {
    let p = ctx.params;
    let grid = curve_grid(p.grid_lo, p.grid_hi, p.grid_step);
    let rows = ctx.per_replicate(|i| {
        let sched = ctx.schedule(i);
        let c = logistic_curve_check(&sched, ctx.lambda, ctx.demo.p, &grid);
        vec![sched.t_half(), c.sup_distance]
    });
    let mut table = ResultTable::new(&["t_half", "sup_distance"]);
    for (i, row) in rows.into_iter().enumerate() {
        table.push(i as u64, row);
    }
    let sup = table.column("sup_distance").unwrap();
    let mut m = Metrics::new();
    put_moments(&mut m, "sup_distance", &sup);
    m.insert("median_sup_distance".into(), median(&sup));
    m.insert("max_sup_distance".into(), sup.iter().copied().fold(0.0, f64::max));
    m.insert(
        "fraction_sup_below_0.05".into(),
        sup.iter().filter(|&&d| d < 0.05).count() as f64 / sup.len() as f64,
    );
    m.insert("grid_points".into(), grid.len() as f64);
    (table, m)
}

fn slowdown(ctx: &Ctx) -> (ResultTable, Metrics) {
    let full = Demographics { p: 1.0, ..*ctx.demo };
    let rows = ctx.per_replicate(|i| {
        let t_p = ctx.schedule(i).t_full();
        let pop = sample_population(&full, &mut ctx.streams.stream(i, StreamRole::Naive));
        let t_1 = simulate_schedule(&full, &pop, &mut ctx.streams.stream(i, StreamRole::LimitAux))
            .t_full();
        vec![t_p, t_1, t_p / t_1]
    });
    let mut table = ResultTable::new(&["t_full_p", "t_full_1", "ratio"]);
    for (i, row) in rows.into_iter().enumerate() {
        table.push(i as u64, row);
    }
    let (n, p) = (ctx.demo.n as f64, ctx.demo.p);
    let mut m = Metrics::new();
    m.insert("slowdown_factor".into(), slowdown_factor(n, p));
    m.insert("center_p".into(), approx_broadcast_center(n, p, ctx.lambda));
    m.insert("center_1".into(), approx_broadcast_center(n, 1.0, ctx.lambda));
    let tp = table.column("t_full_p").unwrap();
    let t1 = table.column("t_full_1").unwrap();
    put_moments(&mut m, "t_full_p", &tp);
    put_moments(&mut m, "t_full_1", &t1);
    m.insert("ratio_of_means".into(), mean(&tp) / mean(&t1));
    (table, m)
}

fn oracle(ctx: &Ctx) -> (ResultTable, Metrics) {
    let rows = ctx.per_replicate(|i| {
        let exact = ctx.schedule(i);
        let mut rng = ctx.streams.stream(i, StreamRole::Naive);
        let pop = sample_population(ctx.demo, &mut rng);
        let naive = simulate_naive(ctx.demo, &pop, &mut rng);
        vec![exact.t_half(), exact.t_full(), naive.t_half(), naive.t_full()]
    });
    let cols = ["t_half_exact", "t_full_exact", "t_half_naive", "t_full_naive"];
    let mut table = ResultTable::new(&cols);
    for (i, row) in rows.into_iter().enumerate() {
        table.push(i as u64, row);
    }
    let mut m = Metrics::new();
    for c in cols {
        put_moments(&mut m, c, &table.column(c).unwrap());
    }
    let col = |c: &str| ecdf(table.column(c).unwrap());
    m.insert("ks_t_half".into(), ks_two_sample(&col("t_half_exact"), &col("t_half_naive")));
    m.insert("ks_t_full".into(), ks_two_sample(&col("t_full_exact"), &col("t_full_naive")));
    (table, m)
}

fn yule(ctx: &Ctx) -> (ResultTable, Metrics) {
    let (p, z0, rates, m_births) = (ctx.demo.p, ctx.demo.z0, ctx.demo.rates, ctx.params.yule_m);
    let rows = ctx.per_replicate(|i| {
        let run = simulate_thinned_yule(p, z0, &rates, m_births, &mut ctx.streams.stream(i, StreamRole::Thinning));
        let reference =
            yule_reference_times(z0, &rates, m_births, p, &mut ctx.streams.stream(i, StreamRole::YuleReference));
        vec![run.t_hat[0], run.t_hat[m_births - 1], run.d[m_births - 1] as f64, reference[m_births - 1]]
    });
    let mut table = ResultTable::new(&["t_hat_1", "t_hat_m", "d_m", "reference_m"]);
    for (i, row) in rows.into_iter().enumerate() {
        table.push(i as u64, row);
    }
    let mut m = Metrics::new();
    for c in ["t_hat_1", "t_hat_m", "d_m", "reference_m"] {
        put_moments(&mut m, c, &table.column(c).unwrap());
    }
    m.insert("expected_t_hat_1".into(), 1.0 / (p * z0));
    m.insert("m".into(), m_births as f64);
    m.insert(
        "ks_t_hat_m_vs_reference".into(),
        ks_two_sample(&ecdf(table.column("t_hat_m").unwrap()), &ecdf(table.column("reference_m").unwrap())),
    );
    (table, m)
}

fn limits(ctx: &Ctx) -> (ResultTable, Metrics) {
    let cfg = ctx.v_config();
    let rows = ctx.per_replicate(|i| {
        let mut rng = ctx.streams.stream(i, StreamRole::Limit);
        let v = sample_v(&cfg, &mut rng);
        let g = gumbel_sample(&mut rng);
        let l = logistic_sample(&mut rng);
        vec![v, g, l, v + g, v + l]
    });
    let cols = ["v", "gumbel", "logistic", "v_plus_gumbel", "v_plus_logistic"];
    let mut table = ResultTable::new(&cols);
    for (i, row) in rows.into_iter().enumerate() {
        table.push(i as u64, row);
    }
    let mut m = Metrics::new();
    for c in cols {
        put_moments(&mut m, c, &table.column(c).unwrap());
    }
    m.insert("ks_v_vs_gumbel".into(), ks_one_sample(&ecdf(table.column("v").unwrap()), gumbel_cdf));
    (table, m)
}
