//! Flow simulation: synthetic turbulence boxes, the Gaussian wake model, and
//! the dynamic multi-turbine farm simulator.

mod farm;
mod rotor;
mod turbulence;
mod wake;

pub use farm::{Farm, WakePacket};
pub use rotor::{
    apply_yaw_command, sensor_offsets, turbine_power, SectorSamples, BOTTOM, LEFT, RIGHT,
    SENSORS_PER_ROTOR, SENSORS_PER_SECTOR, TOP,
};
pub use turbulence::{freestream_at, generate_turbulence_box, BoxHeader, TurbulenceBox, MAGIC_TBOX};
pub use wake::{combine_deficits, static_rotor_speeds, WakeModel, MIN_SQRT_ARG};
