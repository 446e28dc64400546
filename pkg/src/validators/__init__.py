# Classicality checks module
from src.validators.base_validator import BaseClassicalityCheck, BatteryConfig
from src.validators.battery import ClassicalityBattery, run_battery, run_factorial_battery
from src.validators.hankel import build_hankel, check_hankel_psd, hankel_profile, scan_hankel
from src.validators.local_conditions import (
    check_factorial_first_order,
    check_first_order,
    check_local_poissonian,
    check_oscillation_q,
    check_second_order,
    check_sub_poissonian,
    check_zeros,
    detect_oscillation_p,
    first_order_p_form,
)

__all__ = [
    "BatteryConfig",
    "BaseClassicalityCheck",
    "ClassicalityBattery",
    "run_battery",
    "run_factorial_battery",
    "build_hankel",
    "check_hankel_psd",
    "scan_hankel",
    "hankel_profile",
    "check_zeros",
    "check_first_order",
    "first_order_p_form",
    "check_second_order",
    "check_local_poissonian",
    "check_oscillation_q",
    "detect_oscillation_p",
    "check_factorial_first_order",
    "check_sub_poissonian",
]
