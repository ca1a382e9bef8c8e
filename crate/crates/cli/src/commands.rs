use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::sync::Arc;

use rf_core::colorings::Coloring;
use rf_core::hl::{
    find_dense_matrix_with, milliken_search_with, min_fhl_with, search_level_product_mono_with, verify_certificate,
    CertificateBundle, HlMode, SearchOptions, SubtreeColoring,
};
use rf_core::joyce::{
    count_joyce_graphs, count_joyce_trees, validate_blossom, validate_coded_joyce_graph, validate_coded_joyce_order,
    validate_joyce_graph, validate_joyce_order, BlossomTreeTable, Graph, JoyceGraphTable, JoyceOrderTable,
};
use rf_core::strings::parse_node_set;
use rf_core::tree::enumerate_strong_subtrees;
use rf_core::types::{
    catalog, count_types_with, embedding_types_of_height, table_csv, table_row, CountOptions, LengthInjectivity,
    Method, TypeKind,
};
use rf_core::{BitString, Color, ColoringSpec, FiniteTree, LevelProductColoring, ProductColoring, SigKind};
use serde::Deserialize;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::{
    CatalogKind, Command, CountArgs, CountObject, Failure, Injectivity, Kind, MethodArg, ModeArg, Outcome, SearchArgs,
    SearchKind, ValidateArgs, ValidateObject,
};

type Run = Result<Outcome, Failure>;

fn to_value<T: serde::Serialize>(v: T) -> Value {
    serde_json::to_value(v).expect("plain data serializes")
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn parse_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, Failure> {
    serde_json::from_str(&read(path)?).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn file_digest(path: &Path) -> Value {
    match std::fs::read(path) {
        Ok(bytes) => Value::String(format!("{:x}", Sha256::digest(bytes))),
        Err(_) => Value::Null,
    }
}

/// Command name, the parameters that determine the result, and whether it may be cached.
pub fn describe(c: &Command) -> (String, Map<String, Value>, bool) {
    let mut p = Map::new();
    let mut put = |k: &str, v: Value| {
        if !v.is_null() {
            p.insert(k.to_string(), v);
        }
    };
    let (name, cacheable) = match c {
        Command::Count(a) => {
            put("object", to_value(a.object));
            put("n", json!(a.n));
            put("kind", to_value(a.kind));
            put("method", to_value(a.method));
            put("length_injectivity", to_value(a.length_injectivity));
            put("minimizer_depth", to_value(a.minimizer_depth));
            put("graph", to_value(&a.graph));
            ("count", true)
        }
        Command::Validate(a) => {
            put("object", to_value(a.object));
            put("file", json!(a.file.display().to_string()));
            put("tree", to_value(a.tree.as_ref().map(|t| t.display().to_string())));
            ("validate", false)
        }
        Command::Search(a) => {
            put("kind", to_value(a.kind));
            match a.kind {
                SearchKind::MinFhl => {
                    put("N", to_value(a.big_n));
                    put("k", to_value(a.k));
                    put("d", json!(a.d));
                    put("b", json!(a.b));
                    put("cap", json!(a.cap));
                }
                _ => {
                    put("coloring_sha256", a.coloring.as_deref().map_or(Value::Null, file_digest));
                    put("coloring_spec", to_value(&a.coloring_spec));
                    if a.coloring_spec.is_some() {
                        put("tree_height", json!(a.tree_height));
                        if a.kind != SearchKind::Milliken {
                            put("d", json!(a.d));
                        }
                    }
                    put("height", to_value(a.height));
                    if a.kind == SearchKind::Milliken {
                        put("n", json!(a.n));
                    }
                    if a.kind == SearchKind::Hl {
                        put("mode", to_value(a.mode));
                    }
                }
            }
            put("budget", json!(a.budget));
            let oracle_file = a.coloring_spec.as_deref().is_some_and(|s| s.contains("jockusch"));
            ("search", !oracle_file)
        }
        Command::Verify { file } => {
            put("file", json!(file.display().to_string()));
            ("verify", false)
        }
        Command::Table { max_n, csv, length_injectivity } => {
            put("max_n", json!(max_n));
            put("csv", json!(csv));
            put("length_injectivity", to_value(length_injectivity));
            ("table", true)
        }
        Command::EmitCatalog { n, kind } => {
            put("n", json!(n));
            put("kind", to_value(kind));
            ("emit-catalog", true)
        }
    };
    (name.to_string(), p, cacheable)
}

pub fn run(c: &Command) -> Run {
    match c {
        Command::Count(a) => count(a),
        Command::Validate(a) => validate(a),
        Command::Search(a) => search(a),
        Command::Verify { file } => verify(file),
        Command::Table { max_n, csv, length_injectivity } => table(*max_n, *csv, *length_injectivity),
        Command::EmitCatalog { n, kind } => emit_catalog(*n, *kind),
    }
}

fn li(i: Injectivity) -> LengthInjectivity {
    match i {
        Injectivity::Members => LengthInjectivity::Members,
        Injectivity::MeetClosure => LengthInjectivity::MeetClosure,
    }
}

fn count(a: &CountArgs) -> Run {
    let n = a.n;
    let result = match a.object {
        CountObject::Types => {
            let kind = a.kind.ok_or_else(|| Failure::input("count types needs --kind"))?;
            let (tk, is_min) = match kind {
                Kind::EmbAll => (TypeKind::EmbAll, false),
                Kind::TupAll => (TypeKind::TupAll, false),
                Kind::EmbMin => (TypeKind::EmbMin, true),
                Kind::TupMin => (TypeKind::TupMin, true),
            };
            let method = a.method.unwrap_or(if is_min { MethodArg::Predicate } else { MethodArg::Brute });
            let m = match method {
                MethodArg::Brute => Method::Brute,
                MethodArg::Predicate => Method::Predicate,
                MethodArg::Minimizer => Method::Minimizer,
            };
            if n > 4 {
                return Err(Failure::input("type counts are supported for n ≤ 4"));
            }
            let opts =
                CountOptions { length_injectivity: li(a.length_injectivity), minimizer_depth: a.minimizer_depth };
            let c = count_types_with(n, tk, m, opts)?;
            json!({ "n": n, "kind": kind, "method": method, "count": c.count })
        }
        CountObject::JoyceTrees => {
            json!({ "n": n, "object": "joyce-tree", "count": count_joyce_trees(n)? })
        }
        CountObject::JoyceGraphs => {
            let filter = a.graph.as_deref().map(parse_graph).transpose()?;
            let count = count_joyce_graphs(n, filter.as_ref())?;
            let mut v = json!({ "n": n, "object": "joyce-graph", "count": count });
            if let Some(g) = &a.graph {
                v["graph"] = json!(g);
            }
            v
        }
        CountObject::EmbHeight => {
            if n > 64 {
                return Err(Failure::input("heights above 64 are not supported"));
            }
            let e = embedding_types_of_height(n);
            let count = u64::try_from(&e).map_or_else(|_| json!(e.to_string()), |x| json!(x));
            json!({ "n": n, "object": "emb-height", "count": count })
        }
    };
    Ok(Outcome::ok(result))
}

/// `K3` (complete), `E3` (edgeless) or `3:0-1,1-2`.
fn parse_graph(s: &str) -> Result<Graph, Failure> {
    let bad = || Failure::input(format!("bad graph {s:?}; expected K3, E3 or 3:0-1,1-2"));
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
    if let Some(n) = s.strip_prefix('K') {
        return Ok(Graph::complete(num(n)?));
    }
    if let Some(n) = s.strip_prefix('E') {
        return Ok(Graph::new(num(n)?, [])?);
    }
    let (n, edges) = s.split_once(':').ok_or_else(bad)?;
    let mut es = Vec::new();
    for e in edges.split(',').filter(|e| !e.trim().is_empty()) {
        let (x, y) = e.split_once('-').ok_or_else(bad)?;
        es.push((num(x)?, num(y)?));
    }
    Ok(Graph::new(num(n)?, es)?)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum OrderJson {
    Wrapped { labels: Vec<Vec<u64>> },
    Bare(Vec<Vec<u64>>),
}

impl OrderJson {
    fn table(self) -> Result<JoyceOrderTable, Failure> {
        let labels = match self {
            OrderJson::Wrapped { labels } | OrderJson::Bare(labels) => labels,
        };
        Ok(JoyceOrderTable::new(labels)?)
    }
}

#[derive(Deserialize)]
struct GraphJson {
    order: OrderJson,
    edges: Vec<Vec<bool>>,
}

fn verdict(valid: bool, mut body: Value) -> Outcome {
    body["valid"] = json!(valid);
    if valid {
        Outcome::ok(body)
    } else {
        Outcome::negative(body)
    }
}

fn read_nodes(path: &Path) -> Result<Vec<BitString>, Failure> {
    Ok(parse_node_set(&read(path)?)?)
}

fn validate(a: &ValidateArgs) -> Run {
    let f = a.file.as_path();
    Ok(match a.object {
        ValidateObject::JoyceOrder => {
            let t = parse_json::<OrderJson>(f)?.table()?;
            let v = validate_joyce_order(&t);
            verdict(v.is_empty(), json!({ "violations": v }))
        }
        ValidateObject::JoyceGraph => {
            let g: GraphJson = parse_json(f)?;
            let g = JoyceGraphTable::new(g.order.table()?, g.edges)?;
            let v = validate_joyce_graph(&g);
            verdict(v.is_empty(), json!({ "violations": v }))
        }
        ValidateObject::CodedOrder => {
            let r = validate_coded_joyce_order(&read_nodes(f)?);
            verdict(r.valid, to_value(&r))
        }
        ValidateObject::CodedGraph => {
            let r = validate_coded_joyce_graph(&read_nodes(f)?);
            verdict(r.valid, to_value(&r))
        }
        ValidateObject::Blossom => {
            let b: BlossomTreeTable = parse_json(f)?;
            let v = validate_blossom(&b)?;
            verdict(v.is_empty(), json!({ "violations": v }))
        }
        ValidateObject::StrongSubtree => {
            let nodes = read_nodes(f)?;
            if nodes.is_empty() {
                return Err(Failure::input("empty node set"));
            }
            let t = match &a.tree {
                Some(p) => FiniteTree::new(read_nodes(p)?)?,
                None => FiniteTree::full_binary(nodes.iter().map(BitString::len).max().unwrap_or(0) + 1),
            };
            let outside: Vec<&BitString> = nodes.iter().filter(|w| !t.contains(w)).collect();
            if !outside.is_empty() {
                return Ok(verdict(false, json!({ "outside_ambient_tree": outside })));
            }
            match rf_core::is_strong_subtree(&nodes, &t)? {
                Some(w) => verdict(true, json!({ "witness": w.to_json() })),
                None => verdict(false, json!({})),
            }
        }
    })
}

/// Colors every tuple with `spec` and renames the colors to `0..k` in sorted order.
fn index_colors(c: &dyn Coloring, domain: &[Vec<BitString>]) -> Result<(u32, BTreeMap<Vec<BitString>, u32>), Failure> {
    let colored: Vec<(Vec<BitString>, Color)> =
        domain.iter().map(|t| c.color(t).map(|col| (t.clone(), col))).collect::<Result<_, _>>()?;
    let palette: Vec<&Color> = colored.iter().map(|(_, c)| c).collect::<BTreeSet<_>>().into_iter().collect();
    let k = palette.len().max(1) as u32;
    let table = colored.iter().map(|(t, c)| (t.clone(), palette.binary_search(&c).unwrap() as u32)).collect();
    Ok((k, table))
}

fn build_spec(spec: &str) -> Result<Arc<dyn Coloring>, Failure> {
    let read = |p: &str| std::fs::read_to_string(p).map_err(|e| rf_core::Error::Parse(format!("{p}: {e}")));
    Ok(ColoringSpec::parse(spec)?.build(&read)?)
}

fn generated_trees(a: &SearchArgs) -> Result<Vec<FiniteTree>, Failure> {
    if a.tree_height == 0 || a.tree_height > 6 || a.d == 0 || a.d > 3 {
        return Err(Failure::input("generated trees need 1 ≤ tree-height ≤ 6 and 1 ≤ d ≤ 3"));
    }
    Ok(vec![FiniteTree::full_binary(a.tree_height); a.d])
}

fn found(bundle: Option<CertificateBundle>) -> Outcome {
    match bundle {
        None => Outcome::negative(json!({ "found": false })),
        Some(b) => {
            let bundle = to_value(&b);
            let mut o = Outcome::ok(json!({ "found": true, "certificate": bundle["certificate"] }));
            o.artifact = Some(bundle);
            o
        }
    }
}

#[derive(Deserialize)]
struct MillikenInput {
    tree: FiniteTree,
    coloring: SubtreeColoring,
}

fn search(a: &SearchArgs) -> Run {
    let need_height = || a.height.ok_or_else(|| Failure::input("this search needs --height"));
    match a.kind {
        SearchKind::MinFhl => {
            let n = a.big_n.ok_or_else(|| Failure::input("min-fhl needs --N"))?;
            let k = a.k.ok_or_else(|| Failure::input("min-fhl needs --k"))?;
            if !(1..=2).contains(&a.b) {
                return Err(Failure::input("--b must be 1 or 2"));
            }
            let b = a.b;
            let out = min_fhl_with(n, k, a.d, &move |_| b, a.cap, a.budget)?;
            Ok(Outcome::ok(to_value(out)))
        }
        SearchKind::Hl => {
            let height = need_height()?;
            let c = match (&a.coloring, &a.coloring_spec) {
                (Some(p), _) => parse_json::<LevelProductColoring>(p)?,
                (None, Some(s)) => {
                    let trees = generated_trees(a)?;
                    let probe = LevelProductColoring::from_fn(trees.clone(), 1, |_| 0)?;
                    let domain: Vec<Vec<BitString>> = probe.table().keys().cloned().collect();
                    let (k, table) = index_colors(build_spec(s)?.as_ref(), &domain)?;
                    LevelProductColoring::new(trees, k, table)?
                }
                (None, None) => return Err(Failure::input("give --coloring or --coloring-spec")),
            };
            let mode = match a.mode {
                ModeArg::General => HlMode::General,
                ModeArg::Leaves => HlMode::Leaves,
            };
            let cert = search_level_product_mono_with(&c, height, &SearchOptions { mode, budget: a.budget })?;
            Ok(found(cert.map(|certificate| CertificateBundle::Hl { coloring: c, height, certificate })))
        }
        SearchKind::Dense => {
            let c = match (&a.coloring, &a.coloring_spec) {
                (Some(p), _) => parse_json::<ProductColoring>(p)?,
                (None, Some(s)) => {
                    let trees = generated_trees(a)?;
                    let probe = ProductColoring::from_fn(trees.clone(), 1, |_| 0)?;
                    let domain: Vec<Vec<BitString>> = probe.table().keys().cloned().collect();
                    let (k, table) = index_colors(build_spec(s)?.as_ref(), &domain)?;
                    ProductColoring::new(trees, k, table)?
                }
                (None, None) => return Err(Failure::input("give --coloring or --coloring-spec")),
            };
            let cert = find_dense_matrix_with(&c, a.budget)?;
            Ok(found(cert.map(|certificate| CertificateBundle::Dense { coloring: c, certificate })))
        }
        SearchKind::Milliken => {
            let m = need_height()?;
            let (tree, coloring) = match (&a.coloring, &a.coloring_spec) {
                (Some(p), _) => {
                    let input: MillikenInput = parse_json(p)?;
                    (input.tree, input.coloring)
                }
                (None, Some(s)) => {
                    let tree = generated_trees(a)?.swap_remove(0);
                    let subs = enumerate_strong_subtrees(&tree, a.n)?;
                    let leaves: Vec<Vec<BitString>> = subs
                        .iter()
                        .map(|w| {
                            let mut l: Vec<BitString> = w.subtree.leaves().into_iter().cloned().collect();
                            l.sort_by(|x, y| x.cmp_lex(y));
                            l
                        })
                        .collect();
                    let (k, colors) = index_colors(build_spec(s)?.as_ref(), &leaves)?;
                    let c = SubtreeColoring::from_fn(&tree, a.n, k, |nodes| {
                        let mut l: Vec<BitString> =
                            nodes.iter().filter(|x| !nodes.iter().any(|y| x.is_proper_prefix_of(y))).cloned().collect();
                        l.sort_by(|x, y| x.cmp_lex(y));
                        colors[&l]
                    })?;
                    (tree, c)
                }
                (None, None) => return Err(Failure::input("give --coloring or --coloring-spec")),
            };
            let cert = milliken_search_with(&tree, &coloring, m, a.budget)?;
            Ok(found(cert.map(|certificate| CertificateBundle::Milliken { tree, coloring, m, certificate })))
        }
    }
}

fn verify(file: &Path) -> Run {
    let b: CertificateBundle = parse_json(file)?;
    let kind = to_value(&b)["kind"].clone();
    Ok(verdict(verify_certificate(&b), json!({ "kind": kind })))
}

fn table(max_n: usize, csv: bool, i: Injectivity) -> Run {
    if max_n > 4 {
        return Err(Failure::input("the table is computed for n ≤ 4"));
    }
    let rows: Vec<_> = (0..=max_n).map(|n| table_row(n, li(i))).collect();
    let mut o = Outcome::ok(to_value(&rows));
    if csv {
        o.raw = Some(table_csv(&rows));
    }
    Ok(o)
}

fn emit_catalog(n: usize, kind: CatalogKind) -> Run {
    if n > 4 {
        return Err(Failure::input("catalogs are computed for n ≤ 4"));
    }
    let k = match kind {
        CatalogKind::Embedding => SigKind::Embedding,
        CatalogKind::Tuple => SigKind::Tuple,
        CatalogKind::Weak => SigKind::WeakTuple,
    };
    Ok(Outcome::ok(to_value(catalog(n, k))))
}
