from .generators import (
    area_sensor_radius, area_action_radius, probsense_sensor_radius, probsense_action_radius,
    uniform_in_disk, sample_mixture, CoverageScenario,
    gen_area_coverage, gen_prob_sensing, gen_comm_study, gen_tracking, gen_random_prob_coverage,
    generate_scenario,
)

__all__ = [
    'area_sensor_radius', 'area_action_radius', 'probsense_sensor_radius', 'probsense_action_radius',
    'uniform_in_disk', 'sample_mixture', 'CoverageScenario',
    'gen_area_coverage', 'gen_prob_sensing', 'gen_comm_study', 'gen_tracking', 'gen_random_prob_coverage',
    'generate_scenario',
]
