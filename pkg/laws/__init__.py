from laws.CommonLaw import Atom, MixedSojournLaw, ProcessParams
from laws.Bridge import bridge_law, bridge_law_from_u, bridge_sojourn_density, bridge_sojourn_density_from_u
from laws.Elastic import (elastic_law, elastic_transition_density, elastic_transition_density_integral_form,
                          sojourn_law_as_elastic_product)
from laws.FreeSojourn import (free_sojourn_density, free_sojourn_law, free_sojourn_law_mu0,
                              free_survival_probability, sojourn_density_given_position)
from laws.JointDensity import joint_density_v1, joint_density_v2, joint_marginal
from laws.Meander import (meander_endpoint_density, meander_endpoint_normalizer, meander_limit_cdf,
                          meander_limit_endpoint_density, meander_limit_endpoint_mode,
                          meander_limit_endpoint_normalizer, meander_limit_law, meander_sojourn_law_finite_u)
from laws.Excursion import (excursion_endpoint_density, excursion_endpoint_scale, excursion_law,
                            excursion_sojourn_cdf, excursion_sojourn_cdf_half, excursion_sojourn_density,
                            excursion_sojourn_density_half, excursion_sojourn_mean, excursion_uniformity_gap)

__version__ = "0.1.0"
