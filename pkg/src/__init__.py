# Event-based simulator of single-neutron spin experiments
