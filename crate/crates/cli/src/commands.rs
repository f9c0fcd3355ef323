use std::fs;
use std::path::Path;

use log::info;
use tpg_nav::analysis::{
    complexity_report, composite_plot, default_side_length, record_region_paths, run_empty_room_probe,
    run_test_protocol, sign_test, trajectories_csv, ProbeBundle, TrajectoryPlot,
};
use tpg_nav::env::map::{CORRIDOR_SURFACE, ROOM_LABELS};
use tpg_nav::env::LabyrinthMap;
use tpg_nav::evolution::{Experiment, Trainer, CHAMPION_FILE, CHECKPOINT_FILE};
use tpg_nav::tpg::{Champion, GraphPolicy};
use tpg_nav::{Error, Real, Result};

use crate::config::RunConfig;

fn experiment(cfg: &RunConfig) -> Result<Experiment> {
    Experiment::new(LabyrinthMap::my_way_home(), cfg.env(), cfg.params(), cfg.seed)
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn out_dir(cfg: &RunConfig) -> Result<&Path> {
    fs::create_dir_all(&cfg.out_dir).map_err(|e| Error::io(&cfg.out_dir, e))?;
    Ok(&cfg.out_dir)
}

/// Reads a champion and checks it was trained at the configured resolution.
fn load_champion(cfg: &RunConfig, path: &Path) -> Result<Champion> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let champion = Champion::parse(&text).map_err(|e| match e {
        Error::Parse { line, message } => Error::Parse {
            line,
            message: format!("{}: {message}", path.display()),
        },
        other => other,
    })?;
    let expected = cfg.env().state_dim();
    if champion.graph.config.state_dim != expected {
        return Err(Error::StateDimMismatch {
            expected,
            found: champion.graph.config.state_dim,
        });
    }
    Ok(champion)
}

pub fn train(cfg: &RunConfig, resume: bool) -> Result<()> {
    let exp = experiment(cfg)?;
    let out = out_dir(cfg)?;
    let mut trainer = if resume {
        let path = out.join(CHECKPOINT_FILE);
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        let t = Trainer::resume(exp, &text)?;
        info!("resuming after generation {}", t.populations.generation);
        t
    } else {
        Trainer::new(exp)?
    };
    let (champion, score) = trainer.run_to_dir::<Real>(out, cfg.checkpoint_every)?;
    println!(
        "champion root {} ({} ensembles) validation fitness {score:.4}",
        champion.root,
        champion.graph.num_ensembles()
    );
    println!("wrote {}", out.join(CHAMPION_FILE).display());
    Ok(())
}

pub fn test(cfg: &RunConfig, champion_path: &Path) -> Result<()> {
    let champion = load_champion(cfg, champion_path)?;
    let map = LabyrinthMap::my_way_home();
    let report = run_test_protocol::<Real, _, _>(&map, &cfg.env(), cfg.seed, cfg.test_episodes, || {
        GraphPolicy::new(&champion.graph, champion.root)
    })?;
    let out = out_dir(cfg)?;
    write(&out.join("test_report.csv"), &report.to_csv())?;
    write(&out.join("region_quartiles.csv"), &report.quartiles_csv())?;

    let mut summary = report.summary_table();
    match sign_test(&report.returns()) {
        Ok(t) => summary.push_str(&format!(
            "sign test: {} positive, {} negative, p = {:.6e} ({})\n",
            t.successes,
            t.failures,
            t.p_value,
            if t.exact { "exact" } else { "normal approximation" }
        )),
        Err(e) => summary.push_str(&format!("{e}\n")),
    }
    summary.push_str("\nregion  median  successes\n");
    for region in report.regions() {
        let q = report.quartiles(region).expect("region present");
        summary.push_str(&format!(
            "{region:>6} {:>7.3} {:>10}\n",
            q.median,
            report.success_count(region)
        ));
    }
    write(&out.join("summary.txt"), &summary)?;
    print!("{summary}");
    Ok(())
}

fn write_bundle(out: &Path, bundle: &ProbeBundle) -> Result<()> {
    let stem = format!("probe_surface_{}", bundle.surface);
    write(&out.join(format!("{stem}.svg")), &bundle.plot().to_svg())?;
    write(&out.join(format!("{stem}.csv")), &trajectories_csv(&bundle.trajectories()))
}

pub fn probe(cfg: &RunConfig, champion_path: &Path, all_surfaces: bool) -> Result<()> {
    let champion = load_champion(cfg, champion_path)?;
    let map = LabyrinthMap::my_way_home();
    let side = if cfg.probe_side > 0.0 {
        cfg.probe_side
    } else {
        default_side_length(&map)
    };
    let surfaces: Vec<_> = if all_surfaces {
        (1..=ROOM_LABELS.len() as u8).collect()
    } else {
        vec![CORRIDOR_SURFACE]
    };
    let out = out_dir(cfg)?;
    let mut bundles = Vec::new();
    for s in surfaces {
        let bundle = run_empty_room_probe::<Real, _, _>(s, side, &cfg.env(), cfg.seed, cfg.probe_episodes, || {
            GraphPolicy::new(&champion.graph, champion.root)
        })?;
        write_bundle(out, &bundle)?;
        println!("surface {s}: {} episodes", bundle.outcomes.len());
        bundles.push(bundle);
    }
    if all_surfaces {
        write(&out.join("probe_composite.svg"), &composite_plot(&map, &bundles)?.to_svg())?;
    }
    Ok(())
}

pub fn paths(cfg: &RunConfig, champion_path: &Path) -> Result<()> {
    let champion = load_champion(cfg, champion_path)?;
    let map = LabyrinthMap::my_way_home();
    let out = out_dir(cfg)?;
    for region in map.spawn_labels() {
        let outcomes = record_region_paths::<Real, _, _>(&map, &cfg.env(), cfg.seed, region, cfg.path_episodes, || {
            GraphPolicy::new(&champion.graph, champion.root)
        })?;
        let mut plot = TrajectoryPlot::new(&map);
        plot.title = format!("spawn region {region}");
        for o in &outcomes {
            plot.add_trajectory(&o.trajectory);
        }
        write(&out.join(format!("paths_region_{region}.svg")), &plot.to_svg())?;
        let reached = outcomes.iter().filter(|o| o.reached_goal).count();
        let trajectories: Vec<_> = outcomes.into_iter().map(|o| o.trajectory).collect();
        write(&out.join(format!("paths_region_{region}.csv")), &trajectories_csv(&trajectories))?;
        println!("region {region}: {reached}/{} reached the goal", cfg.path_episodes);
    }
    Ok(())
}

pub fn report(cfg: &RunConfig, champion_path: &Path) -> Result<()> {
    let champion = load_champion(cfg, champion_path)?;
    let text = complexity_report(&champion)?.to_text();
    write(&out_dir(cfg)?.join("complexity.txt"), &text)?;
    print!("{text}");
    Ok(())
}
