//! Block-parallel driver for the emitter simulation. Blocks carry their own
//! random substreams, so the merged result is byte-identical for any worker
//! count; workers only change wall-clock time.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use qdot_core::photon::{
    assemble_streams, pulse_blocks, simulate_block, BlockOutput, EmitterModel, HbtSetup,
    PhotonError, SimOutput,
};

pub fn simulate_parallel(
    emitter: &EmitterModel,
    setup: &HbtSetup,
    duration_s: f64,
    seed: u64,
    workers: usize,
) -> Result<SimOutput, PhotonError> {
    let duration_ns = duration_s * 1e9;
    let n_pulses = (duration_ns / emitter.pulse_period_ns) as u64;
    let blocks = pulse_blocks(n_pulses);
    let n_blocks = blocks.len();
    let workers = workers.max(1).min(n_blocks.max(1));

    let mut outputs: Vec<Option<BlockOutput>> = Vec::new();
    outputs.resize_with(n_blocks, || None);
    let outputs = Mutex::new(outputs);
    let next = AtomicUsize::new(0);

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n_blocks {
                    break;
                }
                let out = simulate_block(emitter, setup, duration_ns, blocks[i], seed);
                outputs.lock().expect("worker panicked").insert_block(i, out);
            });
        }
    });

    let outputs: Vec<BlockOutput> = outputs
        .into_inner()
        .expect("worker panicked")
        .into_iter()
        .map(|b| b.expect("every block simulated"))
        .collect();
    assemble_streams(setup, duration_s, outputs)
}

trait InsertBlock {
    fn insert_block(&mut self, i: usize, out: BlockOutput);
}

impl InsertBlock for Vec<Option<BlockOutput>> {
    fn insert_block(&mut self, i: usize, out: BlockOutput) {
        self[i] = Some(out);
    }
}
