use std::path::Path;

use proptest::prelude::*;
use steklov_cli::config::RunConfig;

fn words(list: &'static [&'static str]) -> impl Strategy<Value = &'static str> {
    proptest::sample::select(list)
}

fn floats(lo: f64, hi: f64) -> impl Strategy<Value = String> {
    proptest::collection::vec(lo..hi, 0..4)
        .prop_map(|v| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", "))
}

prop_compose! {
    fn config_text()(
        kind in words(&["mesh", "spectrum", "glue", "reduce", "verify-asymptotics", "optimize"]),
        seed in any::<u64>(),
        base in words(&["disk", "annulus", "square", "cusp"]),
        refinement in 1u32..6,
        inner in 0.05f64..0.95,
        omega in -2.0f64..2.0,
        eps in 0.01f64..0.3,
        alpha in 0.2f64..0.6,
        r in proptest::option::of(1e-6f64..0.2),
        t in 0.1f64..10.0,
        p1 in 0.5f64..5.0,
        flip in any::<(bool, bool)>(),
        orientable in words(&["any", "true", "false"]),
        layers in 4usize..64,
        mass in words(&["consistent", "lumped"]),
        route in words(&["dtn", "full"]),
        param in words(&["fourier", "vertex"]),
        amp in 0.0f64..1.0,
        grid_eps in floats(0.01, 0.3),
        grid_t in floats(0.1, 4.0),
        t_scale in words(&["absolute", "t-star"]),
    ) -> String {
        let r = r.map(|r| format!("r = {r}\n")).unwrap_or_default();
        format!(
            "[run]\nkind = {kind}\nseed = {seed}\n\
             [geometry]\nbase = {base}\nrefinement = {refinement}\ninner_radius = {inner}\nomega = {omega}\n\
             [glue]\neps = {eps}\nalpha = {alpha}\n{r}t = {t}\np1 = {p1}\nflip_p0 = {}\nflip_p1 = {}\n\
             orientable = {orientable}\nlayers = {layers}\n\
             [solver]\nmass = {mass}\nroute = {route}\n\
             [optimize]\nparametrization = {param}\namplitude = {amp}\n\
             [grid]\neps = {grid_eps}\nt = {grid_t}\nt_scale = {t_scale}\n",
            flip.0, flip.1
        )
    }
}

proptest! {
    #[test]
    fn parse_serialize_parse_is_a_fixed_point(text in config_text()) {
        let dir = Path::new(".");
        let parsed = RunConfig::parse(&text, dir);
        prop_assume!(parsed.is_ok());
        let first = parsed.unwrap();
        let canonical = first.to_ini();
        let second = RunConfig::parse(&canonical, dir).unwrap();
        prop_assert_eq!(&first, &second);
        prop_assert_eq!(canonical, second.to_ini());
        prop_assert_eq!(first.hash(), second.hash());
    }
}
