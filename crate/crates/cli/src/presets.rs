//! Named shapes for `gen`. Content is always synthetic: a random low-rank
//! tensor plus Gaussian noise, sized like commonly used benchmark datasets.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub shape: &'static [usize],
    pub core: &'static [usize],
    pub noise: f64,
}

pub const PRESETS: &[Preset] = &[
    Preset {
        name: "cardiac",
        shape: &[256, 256, 14, 20],
        core: &[16, 16, 7, 10],
        noise: 0.1,
    },
    Preset {
        name: "hyperspectral",
        shape: &[1024, 1344, 33],
        core: &[20, 20, 10],
        noise: 0.1,
    },
    Preset {
        name: "vicroads",
        shape: &[1084, 2033, 96],
        core: &[20, 20, 12],
        noise: 0.1,
    },
    Preset {
        name: "coil",
        shape: &[7200, 128, 128, 3],
        core: &[20, 16, 16, 3],
        noise: 0.1,
    },
    Preset {
        name: "cardiac-mini",
        shape: &[64, 64, 14, 20],
        core: &[8, 8, 7, 10],
        noise: 0.1,
    },
    Preset {
        name: "hyperspectral-mini",
        shape: &[128, 128, 32],
        core: &[12, 12, 8],
        noise: 0.1,
    },
    Preset {
        name: "vicroads-mini",
        shape: &[64, 64, 24],
        core: &[10, 10, 6],
        noise: 0.1,
    },
    Preset {
        name: "coil-mini",
        shape: &[72, 32, 32, 3],
        core: &[10, 8, 8, 3],
        noise: 0.1,
    },
];

pub fn find(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name)
}

pub fn names() -> Vec<&'static str> {
    PRESETS.iter().map(|p| p.name).collect()
}
