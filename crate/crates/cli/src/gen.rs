use std::path::{Path, PathBuf};

use vscp_core::reductions::{
    indepset_to_program, sat3_to_2writer, sat3_to_3writer, CnfFormula, ReductionOutput,
    UndirectedGraph,
};

use crate::{emit, read_input, Failure, EXIT_CONSISTENT};

#[derive(Copy, Clone)]
pub enum Target {
    ThreeWriter,
    TwoWriter,
}

/// `out.trace` gets `out.labels.json` next to it.
pub fn sidecar_path(out: &Path) -> PathBuf {
    out.with_extension("labels.json")
}

fn write(out: &Path, r: &ReductionOutput) -> Result<u8, Failure> {
    let io = |path: &Path, e: std::io::Error| Failure::usage(format!("{}: {e}", path.display()));
    std::fs::write(out, r.program.to_string()).map_err(|e| io(out, e))?;
    let labels = sidecar_path(out);
    let json = serde_json::to_string_pretty(&r.label_map).expect("label map serializes");
    std::fs::write(&labels, json + "\n").map_err(|e| io(&labels, e))?;
    emit(&format!("pi={}\n", r.pi));
    eprintln!(
        "wrote {} ({} threads, {} events) and {}",
        out.display(),
        r.program.num_threads(),
        r.program.num_events(),
        labels.display()
    );
    Ok(EXIT_CONSISTENT)
}

pub fn sat(cnf: &Path, out: &Path, target: Target) -> Result<u8, Failure> {
    let f = CnfFormula::parse_dimacs(&read_input(cnf)?)
        .map_err(|e| Failure::usage(format!("{}: {e}", cnf.display())))?;
    let r = match target {
        Target::ThreeWriter => sat3_to_3writer(&f),
        Target::TwoWriter => sat3_to_2writer(&f),
    };
    write(out, &r)
}

pub fn indep(graph: &Path, k: usize, out: &Path) -> Result<u8, Failure> {
    let g = UndirectedGraph::parse_edge_list(&read_input(graph)?)
        .map_err(|e| Failure::usage(format!("{}: {e}", graph.display())))?;
    let r = indepset_to_program(&g, k).map_err(|e| Failure::usage(e.to_string()))?;
    write(out, &r)
}
