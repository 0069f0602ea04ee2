use super::*;

fn job_for(args: &[&str]) -> Result<JobConfig> {
    let mut full = vec!["zepot"];
    full.extend_from_slice(args);
    let cli = Cli::try_parse_from(full).map_err(|e| Error::Config(e.to_string()))?;
    resolve(&cli)
}

#[test]
fn grid_parsing() {
    let g = parse_grid("log:1e-2,20,400").unwrap();
    assert_eq!((g.r_min, g.r_max, g.points, g.spacing), (1e-2, 20.0, 400, Spacing::Log));
    assert_eq!(parse_grid("linear:0,1,5").unwrap().spacing, Spacing::Linear);
    for bad in [
        "log:1,2",
        "cubic:0,1,5",
        "log:a,1,5",
        "log:0,1,5",
        "linear:0,1,1",
        "linear:-1,1,5",
    ] {
        assert!(
            matches!(parse_grid(bad), Err(Error::Config(_)) | Err(Error::Domain(_))),
            "{bad}"
        );
    }
}

#[test]
fn flags_override_config_file() {
    let file =
        JobConfig::from_json(r#"{"base": "free", "inner": "exp", "grid": "log:1e-2,5,10", "r_max": 20}"#).unwrap();
    let cli = Cli::try_parse_from(["zepot", "compose", "--inner", "coulomb", "--rel-tol", "1e-9"]).unwrap();
    let job = merge(&cli, Some(file)).unwrap();
    assert_eq!(job.base.as_deref(), Some("free"));
    assert_eq!(job.inner.as_deref(), Some("coulomb"));
    assert_eq!(job.r_max, Some(20.0));
    assert_eq!(job.tolerance().unwrap().rel, 1e-9);
}

#[test]
fn config_file_errors() {
    assert!(JobConfig::from_json(r#"{"bogus": 1}"#).is_err());
    assert!(JobConfig::from_json("not json").is_err());
    let file = JobConfig::from_json(r#"{"command": "verify"}"#).unwrap();
    let cli = Cli::try_parse_from(["zepot", "compose"]).unwrap();
    assert!(matches!(merge(&cli, Some(file)), Err(Error::Config(_))));
}

#[test]
fn tolerance_profiles() {
    assert_eq!(TolProfile::Strict.tolerance().rel, 1e-12);
    assert_eq!(TolProfile::Fast.tolerance().rel, 1e-8);
    let job = job_for(&["catalog", "--tol-profile", "fast"]).unwrap();
    assert_eq!(job.tolerance().unwrap().rel, 1e-8);
    assert!(job_for(&["catalog", "--rel-tol", "-1"]).is_err());
}

#[test]
fn depth_and_radius_validation() {
    assert!(job_for(&["iterate", "--depth", "0"]).is_err());
    assert!(job_for(&["compose", "--r-max", "0"]).is_err());
    assert!(job_for(&["iterate", "--depth", "2"]).is_ok());
}

#[test]
fn family_parameters_layer_over_text() {
    let mut extra = BTreeMap::new();
    extra.insert("g".to_string(), 2.0);
    let f = family_with("inverse-power-72:n=5", &extra).unwrap();
    assert_eq!(f, FamilyId::InversePower72 { g: 2.0, n: 5.0, ell: 0 });
    assert!(family_with("free", &extra).is_err());
}

#[test]
fn csv_layout() {
    let mut t = Table::new(&["r", "V"]);
    t.push(vec![1.0, 0.5]);
    let csv = t.to_csv();
    let lines: Vec<&str> = csv.lines().collect();
    assert!(lines[0].starts_with("# zepot "));
    assert_eq!(lines[1], "r,V");
    assert_eq!(lines[2], "1.0000000000000000e0,5.0000000000000000e-1");
    assert_eq!(t.column("V").unwrap(), vec![0.5]);
}

#[test]
fn error_exit_codes() {
    assert_eq!(exit_code(&Error::Config("x".into())), EXIT_CONFIG);
    assert_eq!(exit_code(&Error::DepthLimit { depth: 9, max: 4 }), EXIT_CONFIG);
    assert_eq!(exit_code(&Error::Unstable { coarse: 1, fine: 2 }), EXIT_VERIFY);
}
