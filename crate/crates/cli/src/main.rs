use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use multimesh::apps::{
    embedded_multimesh, embedded_remesh, embedded_scheduler, periodic2d_remesh, periodic_multimesh, periodic_scheduler,
    seam_decimate, seam_multimesh, seam_scheduler, EmbeddedParams, PeriodicParams, PipelineConfig, PipelineKind,
};
use multimesh::io::{load_archive, load_medit, load_obj, save_archive, save_medit, save_obj, save_obj_mesh, IoError};
use multimesh::mesh::POSITION;
use multimesh::{Mesh64, MultiMesh64, NodeId};
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "multimesh", version, about = "Validate and remesh trees of simplicial meshes")]
struct Cli {
    /// Seed for every randomised scheduling choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write pass statistics as JSON to this path.
    #[arg(long, global = true, value_name = "PATH")]
    json_stats: Option<PathBuf>,
    /// Pipeline config (a JSON file, or inline JSON starting with `{`);
    /// its fields override the corresponding flags.
    #[arg(long, global = true, value_name = "JSON")]
    config: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the validity report of every node and map.
    Validate {
        #[arg(long)]
        input: PathBuf,
    },
    /// Seam-aware decimation of a textured OBJ.
    Decimate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        target_faces: Option<usize>,
        #[arg(long)]
        output: PathBuf,
    },
    /// Isotropic remeshing of the boundary of a tet mesh.
    RemeshEmbedded {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        target_length: Option<f64>,
        #[arg(long)]
        iters: Option<usize>,
        #[arg(long)]
        envelope_eps: Option<f64>,
        #[arg(long)]
        output: PathBuf,
        #[arg(long)]
        surface_out: Option<PathBuf>,
    },
    /// Isotropic remeshing of a periodic 2D tile.
    Periodic2d {
        #[arg(long)]
        input: PathBuf,
        /// Period as `px,py`.
        #[arg(long, value_parser = parse_period)]
        period: Option<[f64; 2]>,
        #[arg(long)]
        target_length: Option<f64>,
        #[arg(long)]
        iters: Option<usize>,
        #[arg(long)]
        output: PathBuf,
    },
    /// Print the node tree with simplex counts and Euler characteristics.
    Info {
        #[arg(long)]
        input: PathBuf,
    },
}

enum Failure {
    Usage(String),
    Invalid(String),
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<multimesh::MeshError> for Failure {
    fn from(e: multimesh::MeshError) -> Self {
        Failure::Invalid(e.to_string())
    }
}

fn parse_period(s: &str) -> Result<[f64; 2], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [x, y] = parts[..] else {
        return Err(format!("expected `px,py`, got `{s}`"));
    };
    let num = |t: &str| t.parse::<f64>().map_err(|_| format!("bad number `{t}`"));
    Ok([num(x)?, num(y)?])
}

fn read_config(arg: &str) -> Result<PipelineConfig, Failure> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg).map_err(|e| Failure::Usage(format!("config {arg}: {e}")))?
    };
    let cfg: PipelineConfig = serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("config: {e}")))?;
    cfg.validate().map_err(|e| Failure::Usage(format!("config: {e}")))?;
    Ok(cfg)
}

/// Config for `kind`: flag values, overridden by any config fields.
fn merged(cli: &Cli, kind: PipelineKind, flags: PipelineConfig) -> Result<PipelineConfig, Failure> {
    let mut out = flags;
    out.seed = Some(cli.seed);
    if let Some(arg) = &cli.config {
        let cfg = read_config(arg)?;
        if cfg.kind != kind {
            return Err(Failure::Usage(format!("config is for {:?}, command runs {kind:?}", cfg.kind)));
        }
        out.target_faces = cfg.target_faces.or(out.target_faces);
        out.target_length = cfg.target_length.or(out.target_length);
        out.iterations = cfg.iterations.or(out.iterations);
        out.envelope_eps = cfg.envelope_eps.or(out.envelope_eps);
        out.smoothing_weight = cfg.smoothing_weight.or(out.smoothing_weight);
        out.period = cfg.period.or(out.period);
        out.seed = cfg.seed.or(out.seed);
    }
    out.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    Ok(out)
}

fn extension(p: &Path) -> String {
    p.extension().and_then(|e| e.to_str()).unwrap_or("").to_ascii_lowercase()
}

/// Multimesh read from `.obj` (positions, with a `uv` child when textured),
/// `.mesh` (tets, with their boundary as `surface`) or `.mmsh` (archive).
fn load_any(path: &Path) -> Result<MultiMesh64, Failure> {
    match extension(path).as_str() {
        "obj" => {
            let m = load_obj::<f64>(path)?;
            report_mesh("positions", &m.positions)?;
            match m.uv {
                Some(uv) => {
                    report_mesh("uv", &uv)?;
                    Ok(seam_multimesh(m.positions, uv, &m.pairs)?.0)
                }
                None => Ok(MultiMesh64::new(m.positions)),
            }
        }
        "mesh" => {
            let tets = load_medit::<f64>(path)?;
            report_mesh("tets", &tets)?;
            Ok(embedded_multimesh(tets)?.0)
        }
        "mmsh" => Ok(load_archive(path)?),
        other => Err(Failure::Usage(format!("unknown input format `.{other}`"))),
    }
}

fn report_mesh(name: &str, m: &Mesh64) -> Result<(), Failure> {
    let r = m.validate();
    if r.is_valid() {
        Ok(())
    } else {
        Err(Failure::Invalid(format!("{name} mesh is invalid:\n{r}")))
    }
}

fn node_summary(mm: &MultiMesh64) -> Value {
    let nodes: Vec<Value> = mm
        .node_ids()
        .map(|n| {
            let node = mm.node(n).unwrap();
            let m = node.mesh();
            json!({
                "id": n.0,
                "name": node.name,
                "parent": node.parent().map(|p| p.0),
                "dim": m.dim(),
                "counts": m.simplex_counts(),
                "euler": m.euler_characteristic(),
            })
        })
        .collect();
    Value::Array(nodes)
}

/// Number of parent edges by how many child edges map onto them.
fn preimage_histogram(mm: &MultiMesh64, n: NodeId) -> BTreeMap<usize, usize> {
    let (Some(p), Some(map)) = (mm.parent(n), mm.map(n)) else {
        return BTreeMap::new();
    };
    let mut h = BTreeMap::new();
    for e in mm.mesh(p).edges() {
        *h.entry(map.preimage_edges(mm.mesh(n), e.vertices()[0], e.vertices()[1]).len()).or_default() += 1;
    }
    h
}

fn ensure_valid(mm: &MultiMesh64) -> Result<(), Failure> {
    let r = mm.validate();
    if r.is_valid() {
        Ok(())
    } else {
        Err(Failure::Invalid(format!("result is invalid:\n{r}")))
    }
}

fn save_mm(mm: &MultiMesh64, path: &Path, save: impl FnOnce() -> Result<(), IoError>) -> Result<(), Failure> {
    if extension(path) == "mmsh" {
        save_archive(mm, path)?;
    } else {
        save()?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<Value, Failure> {
    let started = Instant::now();
    let mut stats = match &cli.command {
        Command::Validate { input } => {
            let mm = match load_any(input) {
                Err(Failure::Invalid(msg)) => {
                    println!("{msg}");
                    return Err(Failure::Invalid("input is not valid".into()));
                }
                other => other?,
            };
            let r = mm.validate();
            print!("{r}");
            if !r.is_valid() {
                return Err(Failure::Invalid("input is not valid".into()));
            }
            println!("valid");
            json!({ "command": "validate", "valid": true, "nodes": node_summary(&mm) })
        }
        Command::Info { input } => {
            let mm = load_any(input)?;
            for n in mm.preorder() {
                let depth = mm.root_path(n).len() - 1;
                let node = mm.node(n)?;
                let m = node.mesh();
                let [v, e, f, t] = m.simplex_counts();
                print!(
                    "{}{n} `{}`: {}-mesh, V={v} E={e} F={f} T={t}, chi={}",
                    "  ".repeat(depth),
                    node.name,
                    m.dim(),
                    m.euler_characteristic()
                );
                let h = preimage_histogram(&mm, n);
                if !h.is_empty() {
                    print!(", parent-edge preimages {h:?}");
                }
                println!();
            }
            json!({ "command": "info", "nodes": node_summary(&mm) })
        }
        Command::Decimate {
            input,
            target_faces,
            output,
        } => {
            let mut flags = PipelineConfig::new(PipelineKind::SeamDecimate);
            flags.target_faces = *target_faces;
            let cfg = merged(cli, PipelineKind::SeamDecimate, flags)?;
            let m = load_obj::<f64>(input)?;
            let uv = m.uv.ok_or_else(|| Failure::Usage(format!("{} has no texture coordinates", input.display())))?;
            let (mut mm, uv) = seam_multimesh(m.positions, uv, &m.pairs)?;
            let before = mm.mesh(mm.root()).num_facets();
            let mut sched = seam_scheduler(uv);
            let pass = seam_decimate(&mut mm, uv, cfg.target_faces.unwrap(), &mut sched);
            ensure_valid(&mm)?;
            save_mm(&mm, output, || save_obj(&mm, Some(uv), output))?;
            json!({
                "command": "decimate",
                "faces_before": before,
                "faces_after": mm.mesh(mm.root()).num_facets(),
                "stats": pass,
                "total": pass,
                "nodes": node_summary(&mm),
            })
        }
        Command::RemeshEmbedded {
            input,
            target_length,
            iters,
            envelope_eps,
            output,
            surface_out,
        } => {
            let mut flags = PipelineConfig::new(PipelineKind::EmbeddedRemesh);
            flags.target_length = *target_length;
            flags.iterations = *iters;
            flags.envelope_eps = *envelope_eps;
            let cfg = merged(cli, PipelineKind::EmbeddedRemesh, flags)?;
            let tets = load_medit::<f64>(input)?;
            report_mesh("tets", &tets)?;
            let (mut mm, surface) = embedded_multimesh(tets)?;
            let mut params = EmbeddedParams::new(cfg.target_length.unwrap());
            params.iterations = cfg.iterations.unwrap_or(params.iterations);
            params.envelope_eps = cfg.envelope_eps.unwrap_or(params.envelope_eps);
            params.smoothing_weight = cfg.smoothing_weight.unwrap_or(params.smoothing_weight);
            params.seed = cfg.seed.unwrap_or(0);
            let mut sched = embedded_scheduler(&mm, surface, params.envelope_eps)?;
            let rs = embedded_remesh(&mut mm, surface, &params, &mut sched)?;
            ensure_valid(&mm)?;
            save_mm(&mm, output, || save_medit(mm.mesh(mm.root()), output))?;
            if let Some(s) = surface_out {
                save_obj_mesh(mm.mesh(surface), s)?;
            }
            json!({
                "command": "remesh-embedded",
                "target_length": params.target_length,
                "stats": rs,
                "total": rs.total(),
                "nodes": node_summary(&mm),
            })
        }
        Command::Periodic2d {
            input,
            period,
            target_length,
            iters,
            output,
        } => {
            let mut flags = PipelineConfig::new(PipelineKind::Periodic2d);
            flags.period = *period;
            flags.target_length = *target_length;
            flags.iterations = *iters;
            let cfg = merged(cli, PipelineKind::Periodic2d, flags)?;
            let tile = flatten(load_obj::<f64>(input)?.positions)?;
            report_mesh("tile", &tile)?;
            let (mut mm, node, geom) = periodic_multimesh(tile, cfg.period.unwrap(), 1e-9)?;
            let mut params = PeriodicParams::new(cfg.target_length.unwrap());
            params.iterations = cfg.iterations.unwrap_or(params.iterations);
            params.smoothing_weight = cfg.smoothing_weight.unwrap_or(params.smoothing_weight);
            params.seed = cfg.seed.unwrap_or(0);
            let mut sched = periodic_scheduler(node, geom);
            let rs = periodic2d_remesh(&mut mm, node, &geom, &params, &mut sched)?;
            ensure_valid(&mm)?;
            save_mm(&mm, output, || save_obj_mesh(mm.mesh(node), output))?;
            json!({
                "command": "periodic2d",
                "target_length": params.target_length,
                "stats": rs,
                "total": rs.total(),
                "nodes": node_summary(&mm),
            })
        }
    };
    stats["seed"] = json!(cli.seed);
    stats["seconds"] = json!(started.elapsed().as_secs_f64());
    Ok(stats)
}

/// Copy of a triangle mesh with `z` dropped from its positions.
fn flatten(m: Mesh64) -> Result<Mesh64, Failure> {
    let facets: Vec<Vec<u32>> = m.facets().map(|f| m.facet_vertices(f).iter().map(|v| v.0).collect()).collect();
    let mut out = Mesh64::new(2, m.vertex_capacity(), &facets)?;
    let mut data = Vec::with_capacity(2 * m.vertex_capacity());
    for v in m.vertices() {
        let p = m.position(v).unwrap();
        if p[2] != 0.0 {
            return Err(Failure::Usage(format!("tile vertex {v} is not in the z = 0 plane")));
        }
        data.extend_from_slice(&p[..2]);
    }
    out.add_vertex_attribute(POSITION, 2, data)?;
    Ok(out)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    let result = run(&cli).and_then(|stats| {
        if let Some(path) = &cli.json_stats {
            let text = serde_json::to_string_pretty(&stats).expect("stats serialize");
            std::fs::write(path, text + "\n").map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        }
        Ok(())
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
