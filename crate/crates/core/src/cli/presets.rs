//! Bundled figure configurations.

pub const PRESETS: [&str; 8] = ["fig4", "fig5", "fig6", "fig7", "fig8", "fig9", "fig10", "fig11"];

pub fn preset(name: &str) -> Option<&'static str> {
    Some(match name {
        "fig4" => include_str!("../../presets/fig4.toml"),
        "fig5" => include_str!("../../presets/fig5.toml"),
        "fig6" => include_str!("../../presets/fig6.toml"),
        "fig7" => include_str!("../../presets/fig7.toml"),
        "fig8" => include_str!("../../presets/fig8.toml"),
        "fig9" => include_str!("../../presets/fig9.toml"),
        "fig10" => include_str!("../../presets/fig10.toml"),
        "fig11" => include_str!("../../presets/fig11.toml"),
        _ => return None,
    })
}
