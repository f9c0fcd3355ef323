use std::time::Instant;

use tpg_nav::env::{EnvConfig, LabyrinthMap};
use tpg_nav::evolution::{EvolutionParams, Experiment, Trainer};

fn main() -> tpg_nav::Result<()> {
    let mut args = std::env::args().skip(1);
    let width: usize = args.next().map_or(32, |a| a.parse().unwrap());
    let height: usize = args.next().map_or(24, |a| a.parse().unwrap());
    let gens: u32 = args.next().map_or(5, |a| a.parse().unwrap());
    let params = EvolutionParams::default();
    let exp = Experiment::new(LabyrinthMap::my_way_home(), EnvConfig::with_resolution(width, height), params, 1)?;
    let mut t = Trainer::new(exp)?;
    for _ in 0..gens {
        let start = Instant::now();
        let s = t.step::<f32>()?;
        println!("{} {:.2}s {}", s.generation, start.elapsed().as_secs_f64(), s.csv_row());
    }
    Ok(())
}
