use std::path::Path;
use std::process::{Command, Output};

fn certipose(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_certipose"))
        .args(args)
        .current_dir(dir)
        .env_remove("CERTIPOSE_STORE")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

const SMALL: &str = r#"
target = "stripes"
samples = 4
timings = false
volume_samples = 500

[camera]
focal = 62.5
width = 50
height = 50

[partition]
epsilon = 0.1
"#;

#[test]
fn targets_lists_builtins() {
    let dir = tempfile::tempdir().unwrap();
    let o = certipose(dir.path(), &["targets"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    for name in ["digits", "letter", "stripes", "sign"] {
        assert!(text.contains(name));
    }
}

#[test]
fn render_denoise_precompute_estimate() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("small.toml"), SMALL).unwrap();
    let pose = "0.5,-0.5,95,1,-2,1.5";
    let o = certipose(
        d,
        &[
            "render",
            "--config",
            "small.toml",
            "--pose",
            pose,
            "--out",
            "img",
        ],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let img = d.join("img/render_000.pbm");
    assert!(img.exists());

    // A clean render has no isolated pixels.
    let o = certipose(
        d,
        &[
            "denoise",
            "--image",
            "img/render_000.pbm",
            "--output",
            "clean.pbm",
        ],
    );
    assert_eq!(code(&o), 0);
    assert_eq!(
        std::fs::read(&img).unwrap(),
        std::fs::read(d.join("clean.pbm")).unwrap()
    );

    let o = certipose(
        d,
        &["precompute", "--config", "small.toml", "--store", "st"],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let o = certipose(
        d,
        &[
            "estimate",
            "--config",
            "small.toml",
            "--store",
            "st",
            "--image",
            "img/render_000.pbm",
            "--truth",
            pose,
            "--emit-overlay",
            "--out",
            "res",
        ],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let est: serde_json::Value =
        serde_json::from_slice(&std::fs::read(d.join("res/estimate.json")).unwrap()).unwrap();
    assert_eq!(est["truthContained"], true);
    assert!(!est["pieces"].as_array().unwrap().is_empty());
    assert!(d.join("res/overlay.json").exists());

    // A pose far from the observed one is reported as a containment failure.
    let o = certipose(
        d,
        &[
            "estimate",
            "--config",
            "small.toml",
            "--store",
            "st",
            "--image",
            "img/render_000.pbm",
            "--truth",
            "3,3,82,5,5,5",
            "--out",
            "res2",
        ],
    );
    assert_eq!(code(&o), 4);

    // Store built for stripes, asked for digits.
    let o = certipose(
        d,
        &[
            "estimate",
            "--config",
            "small.toml",
            "--store",
            "st",
            "--image",
            "img/render_000.pbm",
            "--target",
            "digits",
        ],
    );
    assert_eq!(code(&o), 3);
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(
        code(&certipose(d, &["partition", "--config", "missing.toml"])),
        2
    );
    std::fs::write(d.join("bad.toml"), "epsilonn = 3\n").unwrap();
    assert_eq!(
        code(&certipose(d, &["partition", "--config", "bad.toml"])),
        2
    );
    assert_eq!(code(&certipose(d, &["render", "--noise", "1.5"])), 2);
    assert_eq!(code(&certipose(d, &["precompute"])), 2);
    assert_eq!(code(&certipose(d, &["render", "--target", "nonesuch"])), 2);
}

#[test]
fn experiment_reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("small.toml"), SMALL).unwrap();
    for out in ["a", "b"] {
        let o = certipose(
            d,
            &[
                "experiment",
                "--config",
                "small.toml",
                "--seed",
                "3",
                "--noise",
                "0.01",
                "--out",
                out,
            ],
        );
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    let a = std::fs::read(d.join("a/experiment.csv")).unwrap();
    assert_eq!(a, std::fs::read(d.join("b/experiment.csv")).unwrap());
    let text = String::from_utf8(a).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "sample,contained,candidatesAfterFilter,timeFilter_s,timeRefine_s,normVolFilter,normVolOurs"
    );
    assert_eq!(
        lines
            .filter(|l| l.split(',').nth(1) == Some("true"))
            .count(),
        4
    );
    let meta: serde_json::Value =
        serde_json::from_slice(&std::fs::read(d.join("a/experiment.json")).unwrap()).unwrap();
    assert_eq!(meta["seed"], 3);
}

#[test]
fn store_path_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("small.toml"), SMALL).unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_certipose"))
        .args(["precompute", "--config", "small.toml", "--threads", "2"])
        .env("CERTIPOSE_STORE", d.join("envstore"))
        .current_dir(d)
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(d.join("envstore/manifest.json").exists());
}
