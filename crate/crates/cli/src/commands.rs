use std::fmt::{self, Write as _};
use std::path::Path;

use ned_core::assignment::parse_cost_matrix;
use ned_core::experiments::{
    anonymize, deanonymize, exhaustive_pairs, k_effect_study, scaling_study, ted_closeness_study, AnonMethod,
    AnonymizationSpec, DeanonConfig, Ranker, TiePolicy,
};
use ned_core::oracle::{exact_ged_on_trees, exact_ted_star, exact_unordered_ted};
use ned_core::{
    build_index, hausdorff_graph_distance, min_cost_perfect_matching, ned_breakdown, ned_directed_breakdown,
    parse_edge_list, parse_tree_literal, ted_star, ted_star_unit, Direction, Distance, Graph, HausdorffSample,
    LevelTree, NodeRef, Signature, TreeExtractor, WeightScheme,
};
use rayon::prelude::*;

use crate::report::{breakdown, decimal, exact, scalar, Format, Table};
use crate::{Cli, Cmd, Method, OracleCmd, RankerArg, StudyCmd, Tie};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Data(m) => f.write_str(m),
        }
    }
}

fn data(e: impl fmt::Display) -> CliError {
    CliError::Data(e.to_string())
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn load_graph(path: &Path, directed: bool) -> Result<Graph, CliError> {
    parse_edge_list(&read(path)?, directed).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn load_weights(spec: &str) -> Result<WeightScheme, CliError> {
    match spec.to_ascii_lowercase().as_str() {
        "unit" => Ok(WeightScheme::Unit),
        "wplus" | "w+" => Ok(WeightScheme::WPlus),
        _ => {
            let path = Path::new(spec);
            WeightScheme::parse(&read(path)?).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
        }
    }
}

fn tree(lit: &str, which: &str) -> Result<LevelTree, CliError> {
    parse_tree_literal(lit).map_err(|e| CliError::Data(format!("{which}: {e}")))
}

fn parse_distance(s: &str) -> Result<Distance, CliError> {
    let bad = || CliError::Usage(format!("--range: expected an integer or p/q fraction, found {s:?}"));
    let int = |t: &str| t.trim().parse::<i64>().map_err(|_| bad());
    let d = match s.split_once('/') {
        Some((n, q)) => {
            let q = int(q)?;
            if q <= 0 {
                return Err(bad());
            }
            Distance::new(int(n)?, q)
        }
        None => Distance::from_integer(int(s)?),
    };
    if d < Distance::from_integer(0) {
        return Err(bad());
    }
    Ok(d)
}

/// Runs one parsed invocation and returns the text to emit.
pub fn run(cli: &Cli) -> Result<String, CliError> {
    let f = cli.format;
    match &cli.cmd {
        Cmd::Ktree { graph, node, k, directed, annotate } => {
            let g = load_graph(graph, *directed)?;
            let v = g.node(node).map_err(data)?;
            let dirs: &[(&str, Direction)] = if g.is_directed() {
                &[("in", Direction::In), ("out", Direction::Out)]
            } else {
                &[("tree", Direction::Undirected)]
            };
            let mut ex = TreeExtractor::new(&g);
            let trees = dirs
                .iter()
                .map(|&(name, d)| Ok((name, ex.extract(v, *k, d).map_err(data)?.canonical_order())))
                .collect::<Result<Vec<_>, CliError>>()?;
            Ok(ktree_report(&g, &trees, *annotate, f))
        }
        Cmd::Dist { tree1, tree2, weights, breakdown: full } => {
            let a = tree1.as_deref().map(|t| tree(t, "--tree1")).transpose()?;
            let b = tree2.as_deref().map(|t| tree(t, "--tree2")).transpose()?;
            let (Some(a), Some(b)) = (a, b) else {
                return Err(CliError::Usage("dist needs both --tree1 and --tree2".into()));
            };
            let w = load_weights(&weights.weights)?;
            let r = ted_star(&a, &b, &w).map_err(data)?;
            Ok(if *full {
                breakdown(&r.breakdown, f, None)
            } else {
                single(&r.distance, f)
            })
        }
        Cmd::Ned { graph1, node1, graph2, node2, k, weights, directed, breakdown: full } => {
            let w = load_weights(&weights.weights)?;
            let g1 = load_graph(graph1, *directed)?;
            let g2 = load_graph(graph2, *directed)?;
            let u = NodeRef::new(&g1, g1.node(node1).map_err(data)?);
            let v = NodeRef::new(&g2, g2.node(node2).map_err(data)?);
            if *directed {
                let (i, o) = ned_directed_breakdown(u, v, *k, &w).map_err(data)?;
                let total = i.distance + o.distance;
                if !*full {
                    return Ok(single(&total, f));
                }
                let mut out = breakdown(&i.breakdown, f, Some("incoming"));
                out.push_str(&breakdown(&o.breakdown, f, Some("outgoing")));
                match f {
                    Format::Csv => writeln!(out, "# ned,{},{}", exact(&total), decimal(&total)),
                    Format::Plain => writeln!(out, "ned: {}", scalar(&total)),
                }
                .expect("writing to a string");
                Ok(out)
            } else {
                let r = ned_breakdown(u, v, *k, &w).map_err(data)?;
                Ok(if *full {
                    breakdown(&r.breakdown, f, None)
                } else {
                    single(&r.distance, f)
                })
            }
        }
        Cmd::Knn {
            graph,
            k,
            index_seed,
            query_graph,
            query_node,
            l,
            range,
            count_evals,
            linear,
            weights,
            directed,
        } => {
            let w = load_weights(&weights.weights)?;
            let radius = range.as_deref().map(parse_distance).transpose()?;
            let g = load_graph(graph, *directed)?;
            let qg = match query_graph {
                Some(p) => Some(load_graph(p, *directed)?),
                None => None,
            };
            let qg = qg.as_ref().unwrap_or(&g);
            let qv = qg.node(query_node).map_err(data)?;
            let q = Signature::extract(&mut TreeExtractor::new(qg), qg, qv, *k).map_err(data)?;
            let idx = build_index(&g, *k, &w, index_seed.unwrap_or(cli.seed)).map_err(data)?;
            let res = match (l, radius) {
                (Some(l), _) if *linear => idx.linear_knn(&q, *l),
                (Some(l), _) => idx.knn(&q, *l),
                (None, Some(r)) if *linear => idx.linear_range(&q, r),
                (None, Some(r)) => idx.range_query(&q, r),
                (None, None) => return Err(CliError::Usage("one of -l or --range is required".into())),
            }
            .map_err(data)?;
            let mut t = Table::new(["rank", "node", "distance", "decimal"]);
            for (i, (id, d)) in res.hits.iter().enumerate() {
                t.push(vec![(i + 1).to_string(), g.label(*id).to_string(), exact(d), decimal(d)]);
            }
            let mut out = t.render(f);
            if *count_evals {
                match f {
                    Format::Csv => writeln!(out, "# evaluations,{},{}", res.evaluations, idx.len()),
                    Format::Plain => writeln!(out, "evaluations: {} of {}", res.evaluations, idx.len()),
                }
                .expect("writing to a string");
            }
            Ok(out)
        }
        Cmd::Graphdist { hausdorff: _, k, graph1, graph2, sample, weights, directed } => {
            let w = load_weights(&weights.weights)?;
            let a = load_graph(graph1, *directed)?;
            let b = load_graph(graph2, *directed)?;
            let s = sample.map(|size| HausdorffSample { size, seed: cli.seed });
            let r = hausdorff_graph_distance(&a, &b, *k, &w, s).map_err(data)?;
            Ok(match f {
                Format::Csv => {
                    let mut t = Table::new([
                        "distance", "decimal", "forward", "backward", "approximate", "nodes_a", "nodes_b",
                    ]);
                    t.push(vec![
                        exact(&r.distance),
                        decimal(&r.distance),
                        exact(&r.forward),
                        exact(&r.backward),
                        r.approximate.to_string(),
                        r.nodes_a.to_string(),
                        r.nodes_b.to_string(),
                    ]);
                    t.render(f)
                }
                Format::Plain => format!(
                    "hausdorff: {}\nforward: {}\nbackward: {}\napproximate: {}\nnodes: {} {}\n",
                    scalar(&r.distance),
                    scalar(&r.forward),
                    scalar(&r.backward),
                    r.approximate,
                    r.nodes_a,
                    r.nodes_b
                ),
            })
        }
        Cmd::Oracle { cmd: OracleCmd::Compare { all, tree1, tree2, nmax, depth_max } } => {
            let pairs = match (all, tree1, tree2) {
                (true, None, None) => exhaustive_pairs(*nmax, *depth_max),
                (false, Some(a), Some(b)) => vec![(tree(a, "--tree1")?, tree(b, "--tree2")?)],
                _ => return Err(CliError::Usage("give either --all or both --tree1 and --tree2".into())),
            };
            oracle_compare(&pairs, f)
        }
        Cmd::Deanon {
            graph,
            directed,
            method,
            ratio,
            k,
            l,
            sample,
            tie_policy,
            ranker,
            weights,
            rows,
        } => {
            let w = load_weights(&weights.weights)?;
            let g = load_graph(graph, *directed)?;
            let method = match method {
                Method::Naive => AnonMethod::Naive,
                Method::Sparsify => AnonMethod::Sparsify,
                Method::Perturb => AnonMethod::Perturb,
            };
            let cfg = DeanonConfig {
                k: *k,
                l: *l,
                sample_size: *sample,
                seed: cli.seed,
                policy: match tie_policy {
                    Tie::Inclusive => TiePolicy::Inclusive,
                    Tie::Exclusive => TiePolicy::Exclusive,
                },
                ranker: match ranker {
                    RankerArg::Ned => Ranker::Ned(w),
                    RankerArg::Degree => Ranker::DegreeHistogram,
                },
            };
            let mut summary = Table::new([
                "method", "ratio", "k", "l", "tie_policy", "ranker", "queries", "hits", "precision", "removed", "added",
            ]);
            let mut detail = Table::new(["ratio", "anon", "truth", "rank", "hit", "truth_distance"]);
            for &r in ratio {
                let anon = anonymize(&g, &AnonymizationSpec { method, ratio: r, seed: cli.seed }).map_err(data)?;
                if let Some(warn) = &anon.warning {
                    eprintln!("warning: {warn}");
                }
                let rep = deanonymize(&g, &anon.graph, &anon.truth, &cfg).map_err(data)?;
                summary.push(vec![
                    format!("{method:?}").to_lowercase(),
                    r.to_string(),
                    k.to_string(),
                    l.to_string(),
                    format!("{tie_policy:?}").to_lowercase(),
                    format!("{ranker:?}").to_lowercase(),
                    rep.queries.to_string(),
                    rep.hits.to_string(),
                    format!("{:.4}", rep.precision()),
                    anon.removed.to_string(),
                    anon.added.to_string(),
                ]);
                for row in &rep.rows {
                    detail.push(vec![
                        r.to_string(),
                        anon.graph.label(row.anon).to_string(),
                        g.label(row.truth).to_string(),
                        row.rank.to_string(),
                        row.hit.to_string(),
                        exact(&row.truth_distance),
                    ]);
                }
            }
            let mut out = summary.render(f);
            if *rows {
                out.push('\n');
                out.push_str(&detail.render(f));
            }
            Ok(out)
        }
        Cmd::Study { cmd } => study(cmd, cli.seed, f),
        Cmd::Match { matrix } => {
            let m = parse_cost_matrix(&read(matrix)?).map_err(|e| CliError::Data(format!("{}: {e}", matrix.display())))?;
            let a = min_cost_perfect_matching(&m);
            Ok(match f {
                Format::Csv => {
                    let mut t = Table::new(["row", "col"]);
                    for (r, c) in a.row_to_col.iter().enumerate() {
                        t.push(vec![r.to_string(), c.to_string()]);
                    }
                    format!("# cost,{}\n{}", a.cost, t.render(f))
                }
                Format::Plain => {
                    let cols: Vec<String> = a.row_to_col.iter().map(|c| c.to_string()).collect();
                    format!("cost: {}\nassignment: {}\n", a.cost, cols.join(" "))
                }
            })
        }
    }
}

fn single(d: &Distance, f: Format) -> String {
    match f {
        Format::Plain => format!("{}\n", scalar(d)),
        Format::Csv => format!("distance,decimal\n{},{}\n", exact(d), decimal(d)),
    }
}

fn ktree_report(g: &Graph, trees: &[(&str, LevelTree)], annotate: bool, f: Format) -> String {
    let mut out = match f {
        Format::Plain if trees.len() == 1 => format!("{}\n", trees[0].1.canonical_literal()),
        _ => {
            let mut t = Table::new(["direction", "tree"]);
            for (name, tr) in trees {
                t.push(vec![name.to_string(), tr.canonical_literal()]);
            }
            t.render(f)
        }
    };
    if annotate {
        // positions follow canonical sibling order; the root has no parent
        let mut t = Table::new(["direction", "level", "position", "parent", "node"]);
        for (name, tr) in trees {
            let origins = tr.origins().expect("extracted trees carry origins");
            for (d, level) in origins.iter().enumerate() {
                for (j, v) in level.iter().enumerate() {
                    let parent = if d == 0 { "-".to_string() } else { tr.parents(d)[j].to_string() };
                    t.push(vec![name.to_string(), (d + 1).to_string(), j.to_string(), parent, g.label(*v).to_string()]);
                }
            }
        }
        out.push('\n');
        out.push_str(&t.render(f));
    }
    out
}

fn oracle_compare(pairs: &[(LevelTree, LevelTree)], f: Format) -> Result<String, CliError> {
    let rows: Vec<Vec<String>> = pairs
        .par_iter()
        .map(|(a, b)| {
            let star = ted_star_unit(a, b).map_err(data)?;
            // deleting all but the root and rebuilding is always a valid script
            let budget = (a.node_count() + b.node_count()) as u32;
            let exact_star = exact_ted_star(a, b, budget).map_err(data)?.exact().expect("budget bounds every script");
            let ted = exact_unordered_ted(a, b).map_err(data)?;
            let ged = exact_ged_on_trees(a, b).map_err(data)?;
            let wplus = ted_star(a, b, &WeightScheme::WPlus).map_err(data)?.distance;
            Ok(vec![
                a.canonical_literal(),
                b.canonical_literal(),
                star.to_string(),
                exact_star.to_string(),
                ted.to_string(),
                ged.to_string(),
                exact(&wplus),
            ])
        })
        .collect::<Result<_, CliError>>()?;
    let mut t = Table::new(["tree1", "tree2", "ted_star", "exact_ted_star", "exact_ted", "exact_ged", "wplus"]);
    for r in rows {
        t.push(r);
    }
    Ok(t.render(f))
}

fn study(cmd: &StudyCmd, seed: u64, f: Format) -> Result<String, CliError> {
    match cmd {
        StudyCmd::TedCloseness { nmax, depth_max } => {
            let pairs = exhaustive_pairs(*nmax, depth_max.unwrap_or(nmax - 1));
            let s = ted_closeness_study(&pairs).map_err(data)?;
            let mut t = Table::new(["levels", "pairs", "mean_relative_error", "stddev_relative_error", "equality_ratio"]);
            t.push(vec![
                "all".into(),
                s.pairs.to_string(),
                format!("{:.6}", s.mean_relative_error),
                format!("{:.6}", s.stddev_relative_error),
                format!("{:.6}", s.equality_ratio),
            ]);
            for sl in &s.by_levels {
                t.push(vec![
                    sl.levels.to_string(),
                    sl.pairs.to_string(),
                    format!("{:.6}", sl.mean_relative_error),
                    String::new(),
                    format!("{:.6}", sl.equality_ratio),
                ]);
            }
            Ok(t.render(f))
        }
        StudyCmd::Scaling { sizes, levels, reps } => {
            let mut t = Table::new(["size", "levels", "reps", "p50_us", "p90_us", "max_us"]);
            for r in scaling_study(sizes, levels, *reps, seed) {
                t.push(vec![
                    r.size.to_string(),
                    r.levels.to_string(),
                    r.reps.to_string(),
                    format!("{:.1}", r.p50_us),
                    format!("{:.1}", r.p90_us),
                    format!("{:.1}", r.max_us),
                ]);
            }
            Ok(t.render(f))
        }
        StudyCmd::KEffect { graph1, graph2, directed, queries, ks, l } => {
            let g1 = load_graph(graph1, *directed)?;
            let g2 = load_graph(graph2, *directed)?;
            let rows = k_effect_study(&g1, &g2, *queries, ks, *l, seed).map_err(data)?;
            let mut t = Table::new(["k", "queries", "zero_matches", "mean_nn_set", "ties_in_top_l"]);
            for r in rows {
                t.push(vec![
                    r.k.to_string(),
                    r.queries.to_string(),
                    r.zero_matches.to_string(),
                    format!("{:.4}", r.mean_nn_set),
                    r.ties_in_top_l.to_string(),
                ]);
            }
            Ok(t.render(f))
        }
    }
}
