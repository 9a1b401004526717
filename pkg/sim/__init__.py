from sim.paths import (SamplePath, bridge_survives, rejection_meander_endpoints, sample_bridge_path,
                       sample_excursion_rejection, sample_free_path, sample_limit_excursion, sample_limit_meander,
                       sample_limit_meander_endpoint, sample_meander_rejection, stream_generators)
from sim.occupation import OccupationResult, occupation_time
from sim.campaign import (CAMPAIGN_LAWS, SimConfig, campaign_window, endpoint_conditioned_gamma, run_campaign,
                          simulate_occupation)
