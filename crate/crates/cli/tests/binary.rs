use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ged_cli::formats::{write_edges, write_groups, EdgeDialect, EdgeFileRecord};
use ged_core::TemporalNetwork;
use ged_testkit::scenario;

fn ged(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ged")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap_or(-1)
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn write_network(dir: &Path, tsn: &TemporalNetwork, dialect: EdgeDialect) -> PathBuf {
    let rows: Vec<EdgeFileRecord> = tsn
        .frames()
        .iter()
        .flat_map(|f| {
            f.edges().map(move |e| EdgeFileRecord {
                from: e.from,
                to: e.to,
                weight: e.weight,
                frame: Some(f.frame_index()),
            })
        })
        .collect();
    let path = dir.join("edges.txt");
    write_edges(fs::File::create(&path).unwrap(), &rows, dialect).unwrap();
    path
}

fn story_inputs(dir: &Path) -> (PathBuf, PathBuf) {
    let (tsn, grouping) = scenario::single_community_network();
    let edges = write_network(dir, &tsn, EdgeDialect::Tab);
    let groups = dir.join("groups.txt");
    write_groups(fs::File::create(&groups).unwrap(), &grouping).unwrap();
    (edges, groups)
}

#[test]
fn pregrouped_run_writes_one_events_file() {
    let dir = tempfile::tempdir().unwrap();
    let (_, groups) = story_inputs(dir.path());
    let out = dir.path().join("out");
    let run = ged(&["run", "--groups", p(&groups), "--measure", "none", "--out", p(&out)]);
    assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
    let events = fs::read_to_string(out.join("events.tsv")).unwrap();
    assert!(events.starts_with("id_evolutions\tevent_type\tgroup1\ttimeframe1\tgroup2\ttimeframe2"));
    assert!(events.contains("\tgrowing\t"));
    // without edges the run ends at the last grouped frame, so nothing dissolves
    assert!(!events.contains("\tdissolving\t"));
    assert!(!out.join("sweep.csv").exists());
    assert!(out.join("chains.tsv").exists());
}

#[test]
fn sweep_has_thirty_six_rows() {
    let dir = tempfile::tempdir().unwrap();
    let (edges, groups) = story_inputs(dir.path());
    let out = dir.path().join("out");
    let run = ged(&["run", "--edges", p(&edges), "--groups", p(&groups), "--sweep", "--out", p(&out)]);
    assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
    let sweep = fs::read_to_string(out.join("sweep.csv")).unwrap();
    let lines: Vec<&str> = sweep.lines().collect();
    assert_eq!(lines.len(), 37);
    assert_eq!(lines[0], "alpha,beta,form,dissolve,shrink,growth,continue,split,merge,total");
    for row in &lines[1..] {
        let cells: Vec<usize> = row.split(',').skip(2).map(|c| c.parse().unwrap()).collect();
        assert_eq!(cells[..7].iter().sum::<usize>(), cells[7]);
    }
    let importance = fs::read_to_string(out.join("importance.tsv")).unwrap();
    assert!(importance.starts_with("group_id\tnode_id\tsp\tranking\ttimeframe"));
}

#[test]
fn extraction_with_all_trackers() {
    let dir = tempfile::tempdir().unwrap();
    let (tsn, _) = scenario::overlapping_shrink();
    let edges = write_network(dir.path(), &tsn, EdgeDialect::Semicolon);
    let out = dir.path().join("out");
    let run = ged(&[
        "run",
        "--edges",
        p(&edges),
        "--edges-dialect",
        "semicolon",
        "--grouping",
        "cpm",
        "--k",
        "3",
        "--tracker",
        "ged",
        "asur",
        "palla",
        "--out",
        p(&out),
    ]);
    assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
    for name in
        ["groups.tsv", "events.tsv", "asur_events.tsv", "contained.tsv", "palla_matched.tsv", "joint_groups.tsv"]
    {
        assert!(out.join(name).exists(), "{name} missing");
    }
    let contained = fs::read_to_string(out.join("contained.tsv")).unwrap();
    assert!(contained.starts_with("id_contained\tgroup_id\ttimeframe\tgroup_joint\ttimeframe_joint"));
    let louvain =
        ged(&["run", "--edges", p(&edges), "--edges-dialect", "semicolon", "--grouping", "louvain", "--out", p(&out)]);
    assert_eq!(code(&louvain), 0, "{}", String::from_utf8_lossy(&louvain.stderr));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let (edges, groups) = story_inputs(dir.path());
    let out = dir.path().join("out");
    let bad_alpha = ged(&["run", "--groups", p(&groups), "--measure", "none", "--alpha", "120", "--out", p(&out)]);
    assert_eq!(code(&bad_alpha), 2);
    let palla_pregrouped = ged(&["run", "--edges", p(&edges), "--groups", p(&groups), "--tracker", "palla"]);
    assert_eq!(code(&palla_pregrouped), 2);
    let missing = ged(&["run", "--groups", "/no/such/file", "--measure", "none", "--out", p(&out)]);
    assert_eq!(code(&missing), 1);

    let broken = dir.path().join("broken.txt");
    fs::write(&broken, "1\t2\t3\n4\t5\n").unwrap();
    let malformed = ged(&["run", "--groups", p(&broken), "--measure", "none", "--out", p(&out)]);
    assert_eq!(code(&malformed), 1);
    assert!(String::from_utf8_lossy(&malformed.stderr).contains("line 2"));

    let config = dir.path().join("ged.toml");
    fs::write(&config, "kappa = 0\n").unwrap();
    assert_eq!(code(&ged(&["run", "--config", p(&config), "--groups", p(&groups)])), 2);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let (edges, groups) = story_inputs(dir.path());
    let out = dir.path().join("out");
    let config = dir.path().join("ged.toml");
    fs::write(
        &config,
        format!(
            "edges = [{:?}]\ngroups = {:?}\nmeasure = \"cd\"\nalpha = 120\nout = {:?}\n",
            p(&edges),
            p(&groups),
            p(&out)
        ),
    )
    .unwrap();
    assert_eq!(code(&ged(&["run", "--config", p(&config)])), 2);
    let run = ged(&["run", "--config", p(&config), "--alpha", "60"]);
    assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
    let events = fs::read_to_string(out.join("events.tsv")).unwrap();
    assert!(events.contains("\t60/50/10\t"));
}

#[test]
fn convert_between_dialects() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.txt");
    fs::write(&input, "4376;27588;0,001924927815206929740\n4376;59745;0,000962463907603464870\n").unwrap();
    let run = ged(&["convert", p(&input), "--from", "semicolon", "--to", "tab"]);
    assert_eq!(code(&run), 0);
    assert_eq!(String::from_utf8(run.stdout).unwrap(), "4376\t27588\t0.0019\n4376\t59745\t0.0010\n");
}

#[test]
fn reports_from_the_binary() {
    let dir = tempfile::tempdir().unwrap();
    let (edges, groups) = story_inputs(dir.path());
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for (out, t) in [(&a, "50"), (&b, "100")] {
        let run = ged(&[
            "run",
            "--edges",
            p(&edges),
            "--groups",
            p(&groups),
            "--alpha",
            t,
            "--beta",
            t,
            "--tracker",
            "ged",
            "asur",
            "--out",
            p(out),
        ]);
        assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
    }

    let compare = ged(&["report", "compare", p(&a.join("events.tsv")), p(&a.join("asur_events.tsv"))]);
    assert_eq!(code(&compare), 0);
    assert!(String::from_utf8(compare.stdout).unwrap().starts_with("# both\n"));

    let grid = ged(&["report", "evolution", p(&a.join("events.tsv"))]);
    assert_eq!(code(&grid), 0);
    let text = String::from_utf8(grid.stdout).unwrap();
    assert!(text.lines().next().unwrap().starts_with("event\tT2\tevent\tT3"));

    let one = ged(&["report", "evolution", p(&a.join("events.tsv")), "--group", "G5@T7"]);
    assert_eq!(code(&one), 0);
    assert_eq!(String::from_utf8(one.stdout).unwrap().lines().filter(|l| l.starts_with("backward")).count(), 3);
    let unknown = ged(&["report", "evolution", p(&a.join("events.tsv")), "--group", "9@3"]);
    assert_eq!(code(&unknown), 1);

    let inclusion = ged(&[
        "report",
        "inclusion",
        "--edges",
        p(&edges),
        "--groups",
        p(&groups),
        "--first",
        "1@2",
        "--second",
        "1@3",
    ]);
    assert_eq!(code(&inclusion), 0, "{}", String::from_utf8_lossy(&inclusion.stderr));
    assert!(String::from_utf8(inclusion.stdout).unwrap().contains("inclusion\t100.00\t"));
    let far = ged(&[
        "report",
        "inclusion",
        "--edges",
        p(&edges),
        "--groups",
        p(&groups),
        "--first",
        "1@2",
        "--second",
        "5@7",
    ]);
    assert_eq!(code(&far), 1);

    let migration = ged(&["report", "migration", "--edges", p(&edges), "--groups", p(&groups), "--group", "2@4"]);
    assert_eq!(code(&migration), 0, "{}", String::from_utf8_lossy(&migration.stderr));
    assert!(String::from_utf8(migration.stdout).unwrap().contains("migrated\t1\n"));
}

#[test]
fn windowed_interactions() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("interactions.tsv");
    let mut rows = String::new();
    // a triangle of mail in each of three days, the last one with a fourth member
    for (day, members) in [(0, vec![1, 2, 3]), (1, vec![1, 2, 3]), (2, vec![1, 2, 3, 4])] {
        for &a in &members {
            for &b in &members {
                if a != b {
                    rows.push_str(&format!("{a}\t{b}\t1\t{}\n", day * 100 + a * 10 + b));
                }
            }
        }
    }
    fs::write(&input, rows).unwrap();
    let out = dir.path().join("out");
    let run =
        ged(&["run", "--interactions", p(&input), "--window", "100", "--k", "3", "--measure", "cd", "--out", p(&out)]);
    assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
    let events = fs::read_to_string(out.join("events.tsv")).unwrap();
    let kinds: Vec<&str> = events.lines().skip(1).map(|l| l.split('\t').nth(1).unwrap()).collect();
    assert_eq!(kinds, ["continuing", "growing"]);

    let no_window = ged(&["run", "--interactions", p(&input), "--out", p(&out)]);
    assert_eq!(code(&no_window), 2);
}
