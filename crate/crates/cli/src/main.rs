use std::path::Path;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use pdpoly::applications::{self, InequalityTag, PartySubsetCollection, SequentialScenario};
use pdpoly::classify::{self, classify_all};
use pdpoly::fine;
use pdpoly::json as pj;
use pdpoly::num::{fmt_decimal, fmt_q, q, qi};
use pdpoly::polytopes::Enumerator;
use pdpoly::{
    Behaviour, Budget, Error, FamilySpec, InputCollection, MembershipCertificate, Scenario,
};

/// Exact partially deterministic polytope computations.
#[derive(Parser)]
#[command(name = "pdpoly", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Global {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Emit indented JSON (implies --json).
    #[arg(long, global = true)]
    pretty: bool,
    /// Also show decimal approximations in text output.
    #[arg(long, global = true)]
    decimal: bool,
    /// Work cap applied to every enumeration stage (rays, pivots, bases, vertices).
    #[arg(long, global = true, value_name = "N")]
    budget: Option<usize>,
    /// Worker threads; 1 forces sequential execution.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Scenario dimensions and layout.
    Scenario {
        #[arg(value_enum, default_value = "info")]
        what: ScenarioView,
        #[command(flatten)]
        sc: ScenarioArg,
    },
    /// Vertex set of a family.
    Vertices(FamilyArgs),
    /// Facets of a family, from its vertices.
    Facets(FamilyArgs),
    /// Membership certificate of a behaviour in a family.
    Member {
        /// Behaviour file, inline JSON, or one of: pr, uniform, partial-pr:K.
        #[arg(long)]
        behaviour: String,
        #[command(flatten)]
        fam: FamilyArgs,
    },
    /// Equivalence classes of all input collections.
    Classify {
        #[command(flatten)]
        sc: ScenarioArg,
    },
    /// End-to-end reproduction of a worked example with a pass/fail summary.
    Demo {
        #[arg(value_enum)]
        name: Demo,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ScenarioView {
    Info,
    Dims,
}

#[derive(Clone, Copy, ValueEnum)]
enum Demo {
    Fig4,
    Fig5,
    Sliwa,
    Fine,
    Broadcast,
    Lf,
}

#[derive(Args)]
struct ScenarioArg {
    /// Scenario file, inline JSON, a built-in (chsh, tripartite, bipartite3,
    /// simplex) or `INPUTS/OUTPUTS` such as `2,2,2/2`.
    #[arg(long, default_value = "chsh")]
    scenario: String,
}

#[derive(Args)]
struct FamilyArgs {
    #[arg(long, value_parser = ["e", "bell", "ns", "pd"])]
    family: String,
    /// Deterministic input collection for `pd`: file or inline JSON such as `{"A":["1"]}`.
    #[arg(long)]
    collection: Option<String>,
    #[command(flatten)]
    sc: ScenarioArg,
}

fn read_source(src: &str) -> anyhow::Result<Value> {
    let text = if src.trim_start().starts_with('{') {
        src.to_string()
    } else {
        std::fs::read_to_string(src).with_context(|| format!("reading {src}"))?
    };
    serde_json::from_str(&text)
        .map_err(|e| Error::validation(format!("invalid JSON in {src}: {e}")).into())
}

fn builtin_scenario(name: &str) -> Option<pdpoly::Result<Scenario>> {
    Some(match name {
        "chsh" => Ok(Scenario::chsh()),
        "tripartite" => Scenario::uniform(&[2, 2, 2], 2),
        "bipartite3" => Scenario::uniform(&[3, 3], 2),
        "simplex" => Scenario::uniform(&[1], 3),
        _ => {
            let (ins, outs) = name.split_once('/')?;
            let ins: Vec<usize> = ins
                .split(',')
                .map(|x| x.trim().parse().ok())
                .collect::<Option<_>>()?;
            Scenario::uniform(&ins, outs.trim().parse().ok()?)
        }
    })
}

fn load_scenario(src: &str) -> anyhow::Result<Scenario> {
    if !Path::new(src).exists() && !src.trim_start().starts_with('{') {
        if let Some(s) = builtin_scenario(src) {
            return Ok(s?);
        }
        bail!(Error::validation(format!("unknown scenario {src:?}")));
    }
    Ok(pj::scenario_from_json(&read_source(src)?)?)
}

fn load_family(s: &Scenario, f: &FamilyArgs) -> anyhow::Result<FamilySpec> {
    let m = f
        .collection
        .as_deref()
        .map(|c| -> anyhow::Result<InputCollection> {
            Ok(pj::collection_from_json(s, &read_source(c)?)?)
        })
        .transpose()?;
    Ok(FamilySpec::parse(&f.family, m)?)
}

fn load_behaviour(s: &Scenario, src: &str) -> anyhow::Result<Behaviour> {
    if let Some(k) = src.strip_prefix("partial-pr:") {
        let k: usize = k
            .parse()
            .map_err(|_| Error::validation("partial-pr needs a party index"))?;
        return Ok(applications::partial_pr_box(s, k)?);
    }
    match src {
        "pr" => Ok(applications::pr_box(s, None)?),
        "uniform" => Ok(Behaviour::uniform(s)),
        _ => Ok(pj::behaviour_from_json(&read_source(src)?, Some(s))?),
    }
}

struct Out<'a> {
    g: &'a Global,
}

impl Out<'_> {
    fn json_mode(&self) -> bool {
        self.g.json || self.g.pretty
    }

    fn emit(&self, v: &Value) {
        if self.g.pretty {
            println!("{}", serde_json::to_string_pretty(v).unwrap());
        } else {
            println!("{v}");
        }
    }

    fn num(&self, x: &pdpoly::Q) -> String {
        if self.g.decimal {
            format!("{} (~{})", fmt_q(x), fmt_decimal(x, 6))
        } else {
            fmt_q(x)
        }
    }
}

fn budget(g: &Global) -> Budget {
    match g.budget {
        Some(n) => Budget {
            max_rays: Some(n),
            max_pivots: Some(n),
            max_bases: Some(n),
            max_vertices: Some(n),
        },
        None => Budget::default(),
    }
}

fn scenario_cmd(out: &Out, what: ScenarioView, s: &Scenario) {
    let dims = json!({
        "d": s.ambient_dim(),
        "d_tilde": s.full_dimension(),
        "D": s.pironio_dimension(),
        "nontrivial": s.is_nontrivial(),
    });
    if out.json_mode() {
        match what {
            ScenarioView::Dims => out.emit(&dims),
            ScenarioView::Info => {
                out.emit(&json!({"scenario": pj::scenario_to_json(s), "dims": dims}))
            }
        }
        return;
    }
    if let ScenarioView::Info = what {
        println!("scenario {s:?}");
        println!("contexts {}", s.num_contexts());
    }
    println!("d {}", s.ambient_dim());
    println!("d_tilde {}", s.full_dimension());
    println!("D {}", s.pironio_dimension());
    println!("nontrivial {}", s.is_nontrivial());
}

fn certificate_text(out: &Out, c: &MembershipCertificate) {
    match c {
        MembershipCertificate::Inside { weights } => {
            println!("inside");
            for (i, w) in weights {
                println!("  vertex {i} weight {}", out.num(w));
            }
        }
        MembershipCertificate::Outside { separator } => {
            println!("outside");
            let cs: Vec<String> = separator.coeffs.iter().map(|c| out.num(c)).collect();
            println!(
                "  separator [{}] <= {}",
                cs.join(" "),
                out.num(&separator.bound)
            );
        }
    }
}

struct Checks {
    rows: Vec<(String, bool, String)>,
}

impl Checks {
    fn new() -> Self {
        Checks { rows: Vec::new() }
    }

    fn check(&mut self, name: &str, ok: bool, detail: impl Into<String>) {
        self.rows.push((name.to_string(), ok, detail.into()));
    }

    fn finish(self, out: &Out, demo: &str) -> anyhow::Result<bool> {
        let all = self.rows.iter().all(|r| r.1);
        if out.json_mode() {
            out.emit(&json!({
                "demo": demo,
                "pass": all,
                "checks": self.rows.iter().map(|(n, ok, d)| json!({"name": n, "pass": ok, "detail": d})).collect::<Vec<_>>(),
            }));
        } else {
            for (n, ok, d) in &self.rows {
                println!("{} {n}: {d}", if *ok { "PASS" } else { "FAIL" });
            }
            println!(
                "{demo}: {}/{} checks passed",
                self.rows.iter().filter(|r| r.1).count(),
                self.rows.len()
            );
        }
        Ok(all)
    }
}

fn sizes(c: &pdpoly::Classification) -> Vec<usize> {
    c.classes.iter().map(|k| k.size()).collect()
}

fn demo(out: &Out, name: Demo, e: &Enumerator) -> anyhow::Result<bool> {
    let mut ck = Checks::new();
    let label = match name {
        Demo::Fig4 => {
            let s = Scenario::uniform(&[3, 3], 2)?;
            let c = classify_all(&s);
            ck.check(
                "classes",
                c.num_classes() == 17,
                format!("{} classes", c.num_classes()),
            );
            let bell = c.bell_class().map_or(0, |k| k.size());
            ck.check("bell class", bell == 48, format!("{bell} collections"));
            let ns = c.ns_class().map_or(0, |k| k.size());
            ck.check("ns class", ns == 1, format!("{ns} collection"));
            ck.check(
                "hasse",
                !c.hasse.is_empty(),
                format!("{} covering relations", c.hasse.len()),
            );
            "fig4"
        }
        Demo::Fig5 => {
            let s = Scenario::uniform(&[2, 2, 2], 2)?;
            let c = classify_all(&s);
            let mut sz = sizes(&c);
            sz.sort_unstable_by(|a, b| b.cmp(a));
            ck.check("classes", sz == [54, 3, 3, 3, 1], format!("sizes {sz:?}"));
            for k in 0..3 {
                let m = s.party_collection(&[k])?;
                let n = e.pd(&s, &m)?.len();
                ck.check(
                    &format!("pd vertices M^{{{k}}}"),
                    n == 96,
                    format!("{n} vertices"),
                );
            }
            "fig5"
        }
        Demo::Sliwa => {
            let s = Scenario::uniform(&[2, 2, 2], 2)?;
            let tags = [
                InequalityTag::Sliwa3A,
                InequalityTag::Sliwa3B,
                InequalityTag::Sliwa3C,
            ];
            let ineqs: Vec<_> = tags
                .iter()
                .map(|t| applications::build_inequality(&s, t.clone(), None))
                .collect::<pdpoly::Result<_>>()?;
            let boxes: Vec<Behaviour> = (0..3)
                .map(|k| applications::partial_pr_box(&s, k))
                .collect::<pdpoly::Result<_>>()?;
            for (k, b) in boxes.iter().enumerate() {
                let vals: Vec<pdpoly::Q> = ineqs.iter().map(|i| i.value(b)).collect();
                let ok = (0..3).all(|j| vals[j] == if j == k { qi(2) } else { qi(4) });
                let shown: Vec<String> = vals.iter().map(|v| out.num(v)).collect();
                ck.check(
                    &format!("box {k}"),
                    ok,
                    format!("values {}", shown.join(" ")),
                );
            }
            let w = applications::union_nonconvexity_witness(&s, e)?;
            let vals: Vec<pdpoly::Q> = ineqs.iter().map(|i| i.value(&w.mixture)).collect();
            // linearity: (2 + 4 + 4) / 3 on every inequality
            ck.check(
                "third mixture",
                vals.iter().all(|v| *v == q(10, 3)),
                format!(
                    "values {}",
                    vals.iter()
                        .map(|v| out.num(v))
                        .collect::<Vec<_>>()
                        .join(" ")
                ),
            );
            ck.check(
                "union not convex",
                w.holds(),
                "each box inside its own PD, mixture outside all three",
            );
            for (a, b) in [(0, 1), (0, 2), (1, 2)] {
                let half = q(1, 2);
                let mix =
                    Behaviour::mix(&[(half.clone(), boxes[a].clone()), (half, boxes[b].clone())])?;
                let (va, vb) = (ineqs[a].value(&mix), ineqs[b].value(&mix));
                ck.check(
                    &format!("half pair {a}{b}"),
                    va == qi(3) && vb == qi(3),
                    format!(
                        "{} on {}, {} on {}",
                        out.num(&va),
                        tags[a],
                        out.num(&vb),
                        tags[b]
                    ),
                );
            }
            let r = applications::inseparability_report(
                &w.mixture,
                &PartySubsetCollection::maximal(&s),
                e,
            )?;
            // The three partial PR boxes are vertices of the merged vertex
            // list, so the mixture is inside the convex hull of the union.
            ck.check(
                "conv of union",
                r.conv_union.is_inside(),
                format!(
                    "mixture is {} conv of the union",
                    if r.conv_union.is_inside() {
                        "inside"
                    } else {
                        "outside"
                    }
                ),
            );
            "sliwa"
        }
        Demo::Fine => {
            let s = Scenario::uniform(&[1, 3], 2)?;
            let bell = e.bell(&s)?;
            let ns = e.ns(&s)?;
            ck.check(
                "ns equals bell",
                ns.vertices() == bell.vertices(),
                format!("{} vertices", ns.len()),
            );
            let vs = bell.vertices();
            let wp = Behaviour::mix(&[
                (q(1, 2), vs[0].clone()),
                (q(1, 3), vs[3].clone()),
                (q(1, 6), vs[vs.len() - 1].clone()),
            ])?;
            let j = fine::fine_joint_one_multi_party(&wp)?;
            ck.check(
                "product joint",
                fine::verify_joint(&j, &wp),
                format!("{} joint entries", j.tables[0].len()),
            );
            let chsh = Scenario::chsh();
            let m = chsh.party_collection(&[0])?;
            let set = e.pd(&chsh, &m)?;
            let u = Behaviour::uniform(&chsh);
            let cert = set.membership(&u, e.budget())?;
            let model = fine::model_from_certificate(&u, &set, &cert)?;
            let j = fine::partial_joint_from_model(&model)?;
            ck.check(
                "pd model joint",
                fine::verify_joint(&j, &u),
                format!("{} model terms", model.terms.len()),
            );
            "fine"
        }
        Demo::Broadcast => {
            let s = Scenario::uniform(&[2, 2, 2], 2)?;
            let one = applications::broadcast_local_vertices(&s, &[0], None, e)?;
            let pd = e.pd(&s, &s.party_collection(&[0])?)?;
            ck.check(
                "single broadcaster is pd",
                one.vertices() == pd.vertices(),
                format!("{} vertices", one.len()),
            );
            let joint = applications::broadcast_local_vertices(&s, &[0], Some(&[vec![1, 2]]), e)?;
            ck.check(
                "one block is pd",
                joint.vertices() == pd.vertices(),
                format!("{} vertices", joint.len()),
            );
            let split =
                applications::broadcast_local_vertices(&s, &[0], Some(&[vec![1], vec![2]]), e)?;
            let bell = e.bell(&s)?;
            ck.check(
                "split blocks are local",
                split.vertices() == bell.vertices(),
                format!("{} vertices", split.len()),
            );
            let b = applications::partial_pr_box(&s, 0)?;
            let inn = joint.membership(&b, e.budget())?.is_inside();
            let outn = !split.membership(&b, e.budget())?.is_inside();
            ck.check(
                "partial PR box",
                inn && outn,
                "inside with a joint block, outside with split blocks",
            );
            "broadcast"
        }
        Demo::Lf => {
            let s = Scenario::uniform(&[3, 3], 2)?;
            for z in [1usize, 2] {
                let sw = SequentialScenario::new(s.clone(), vec![z, z])?;
                let (sc, m) = applications::sequential_to_pd(&sw);
                let bell = classify::is_bell(&sc, &m);
                let ns = classify::is_ns(&sc, &m);
                let ok = if z == 1 { !bell && !ns } else { bell };
                ck.check(
                    &format!("|Z|={z}"),
                    ok,
                    format!(
                        "M^Z={m:?} bell={bell} ns={ns} msf={}",
                        classify::msf(&sc, &m)
                    ),
                );
            }
            "lf"
        }
    };
    ck.finish(out, label)
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    if let Some(n) = cli.global.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("thread pool")?;
    }
    let out = Out { g: &cli.global };
    let e = Enumerator::new(budget(&cli.global));
    match &cli.cmd {
        Cmd::Scenario { what, sc } => scenario_cmd(&out, *what, &load_scenario(&sc.scenario)?),
        Cmd::Vertices(f) => {
            let s = load_scenario(&f.sc.scenario)?;
            let set = load_family(&s, f)?.vertices(&s, &e)?;
            if out.json_mode() {
                out.emit(&pj::vertex_set_to_json(&set));
            } else {
                println!("{} vertices ({})", set.len(), set.family());
                for v in set.vertices() {
                    let xs: Vec<String> = v.as_vector().iter().map(|x| out.num(x)).collect();
                    println!("[{}]", xs.join(" "));
                }
            }
        }
        Cmd::Facets(f) => {
            let s = load_scenario(&f.sc.scenario)?;
            let set = load_family(&s, f)?.vertices(&s, &e)?;
            let h = set.facets(e.budget())?;
            if out.json_mode() {
                out.emit(&pj::hrep_to_json(&h));
            } else {
                println!(
                    "{} equalities, {} facets",
                    h.equalities.len(),
                    h.inequalities.len()
                );
                for f in &h.inequalities {
                    let cs: Vec<String> = f.coeffs.iter().map(|c| out.num(c)).collect();
                    println!("[{}] <= {}", cs.join(" "), out.num(&f.bound));
                }
            }
        }
        Cmd::Member { behaviour, fam } => {
            let s = load_scenario(&fam.sc.scenario)?;
            let set = load_family(&s, fam)?.vertices(&s, &e)?;
            let b = load_behaviour(&s, behaviour)?;
            let cert = set.membership(&b, e.budget())?;
            if out.json_mode() {
                out.emit(&pj::certificate_to_json(&cert));
            } else {
                certificate_text(&out, &cert);
            }
        }
        Cmd::Classify { sc } => {
            let s = load_scenario(&sc.scenario)?;
            let c = classify_all(&s);
            if out.json_mode() {
                out.emit(&pj::classification_to_json(&c));
            } else {
                println!("{} classes", c.num_classes());
                for (i, k) in c.classes.iter().enumerate() {
                    let tag = if k.is_bell {
                        " bell"
                    } else if k.is_ns {
                        " ns"
                    } else {
                        ""
                    };
                    println!(
                        "{i}: size {} msf {} rep {:?}{tag}",
                        k.size(),
                        k.msf,
                        k.representative
                    );
                }
                for (a, b) in &c.hasse {
                    println!("{a} < {b}");
                }
            }
        }
        Cmd::Demo { name } => return demo(&out, *name, &e),
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            match err.downcast_ref::<Error>() {
                Some(e) if e.is_budget() => ExitCode::from(2),
                Some(_) => ExitCode::from(3),
                None if err.downcast_ref::<std::io::Error>().is_some() => ExitCode::from(3),
                None => ExitCode::from(1),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_names() {
        assert_eq!(builtin_scenario("chsh").unwrap().unwrap(), Scenario::chsh());
        let s = builtin_scenario("2,3/3").unwrap().unwrap();
        assert_eq!(
            (s.num_inputs(0), s.num_inputs(1), s.num_outputs(1, 2)),
            (2, 3, 3)
        );
        assert!(builtin_scenario("2,x/2").is_none());
        assert!(builtin_scenario("nope").is_none());
    }

    #[test]
    fn inline_json_source() {
        let v = read_source(r#"{"A":["1"]}"#).unwrap();
        let m = pj::collection_from_json(&Scenario::chsh(), &v).unwrap();
        assert!(m.contains(0, 0) && !m.contains(1, 0));
        assert!(read_source("{not json").is_err());
    }
}
