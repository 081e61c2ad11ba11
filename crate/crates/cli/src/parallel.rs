use choco_core::grundy::{GrundyError, GrundyTable, MexScratch, MoveGenerator, TableBuilder};
use choco_core::{Bounds, RuleSet};
use rayon::prelude::*;

/// Builds a table with `threads` workers (`0` picks the rayon default).
///
/// Each coordinate-sum layer is evaluated in parallel against the layers
/// already committed, then committed in one go. The result is identical to
/// the single-threaded build.
pub fn build_table(rules: RuleSet, bounds: Bounds, threads: usize) -> Result<GrundyTable, GrundyError> {
    build_with_moves(rules, bounds, threads)
}

pub fn build_with_moves<G>(moves: G, bounds: Bounds, threads: usize) -> Result<GrundyTable, GrundyError>
where
    G: MoveGenerator + Send + Sync,
{
    let builder = TableBuilder::with_moves(moves, bounds)?;
    if threads == 1 {
        return builder.run();
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().expect("failed to start worker pool");
    pool.install(|| run_layers(builder))
}

fn run_layers<G: MoveGenerator + Send + Sync>(mut builder: TableBuilder<G>) -> Result<GrundyTable, GrundyError> {
    for s in 0..=builder.max_layer() {
        let layer = builder.layer(s);
        let values = layer
            .par_iter()
            .map_init(MexScratch::new, |scratch, &p| builder.evaluate(p, scratch))
            .collect::<Result<Vec<u32>, _>>()?;
        for (p, v) in layer.into_iter().zip(values) {
            builder.commit(p, v);
        }
    }
    Ok(builder.finish())
}
